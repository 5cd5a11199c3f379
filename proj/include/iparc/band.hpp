#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace iparc {

/// A binary mask over a rectangular grid (true = foreground). Rows are packed
/// into 64-bit words; bits past the grid width are kept zero so that equality
/// and hashing can work directly on the words. The plane outside the grid is
/// background for every operation.
class BinaryBand {
 public:
  BinaryBand() = default;
  BinaryBand(int width, int height, bool fill = false);

  int width() const { return w_; }
  int height() const { return h_; }
  int words_per_row() const { return wpr_; }

  bool at(int r, int c) const {
    if (r < 0 || r >= h_ || c < 0 || c >= w_) return false;
    return (words_[static_cast<size_t>(r) * wpr_ + (c >> 6)] >> (c & 63)) & 1u;
  }

  void set(int r, int c, bool v) {
    uint64_t& w = words_[static_cast<size_t>(r) * wpr_ + (c >> 6)];
    const uint64_t bit = 1ull << (c & 63);
    if (v)
      w |= bit;
    else
      w &= ~bit;
  }

  const uint64_t* row(int r) const { return words_.data() + static_cast<size_t>(r) * wpr_; }
  uint64_t* row(int r) { return words_.data() + static_cast<size_t>(r) * wpr_; }

  /// Mask with ones for every in-grid column of a row.
  uint64_t tail_mask() const { return tail_mask_; }

  int popcount() const;
  bool none() const;
  bool all() const;

  /// True when every foreground pixel of `other` is foreground here.
  bool covers(const BinaryBand& other) const;
  bool intersects(const BinaryBand& other) const;

  BinaryBand& operator|=(const BinaryBand& other);
  BinaryBand& operator&=(const BinaryBand& other);
  /// Removes other's foreground from this band.
  BinaryBand& subtract(const BinaryBand& other);
  BinaryBand complement() const;

  bool operator==(const BinaryBand& other) const = default;

  /// Appends this band's bits, tightly packed, to a memoisation key.
  void append_key(std::string& out) const;

 private:
  int w_ = 0, h_ = 0, wpr_ = 0;
  uint64_t tail_mask_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace iparc
