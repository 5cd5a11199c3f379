#pragma once

#include <array>
#include <optional>
#include <vector>

#include "iparc/band.hpp"
#include "iparc/image.hpp"
#include "iparc/se.hpp"

namespace iparc {

/// Dilation: the union of the SE stamped at every foreground pixel. Output
/// pixel (r,c) is foreground iff some input foreground pixel, with the SE
/// placed origin-aligned on it, covers (r,c) with an FG cell. Cells outside
/// the grid are background; the output has the input's dimensions.
BinaryBand dilate(const BinaryBand& band, const StructuringElement& se);

/// Erosion: keeps pixels where every FG cell of the SE, placed origin-aligned,
/// lands on input foreground. An SE whose FG cells extend past the border
/// never fits there.
BinaryBand erode(const BinaryBand& band, const StructuringElement& se);

/// Hit-or-miss: pixels where all FG cells match input foreground and all BG
/// cells match input background. DontCare cells are unconstrained.
BinaryBand hit_or_miss(const BinaryBand& band, const StructuringElement& se);

/// The band-split prologue for selection programs: returns a copy of the
/// image's foreground indicator (values 0/1) with every hit-or-miss match
/// position recoloured to 2.
Image hit_or_miss_colored(const Image& img, const StructuringElement& se);

/// Band of cells whose value equals colour exactly. Throws
/// std::invalid_argument when colour is outside [0, num_colors).
BinaryBand extract_band(const Image& img, int colour);

/// Total lookup table from a pair of band bits to an output colour. Rows are
/// kept in canonical (b1, b2) order.
class ColorRule {
 public:
  ColorRule() = default;
  /// rows are [b1, b2, out] triples; b1/b2 must be 0/1, out non-negative, and
  /// no (b1, b2) pair may repeat. The rule may be partial.
  explicit ColorRule(const std::vector<std::array<int, 3>>& rows);

  static ColorRule constant_zero();

  void set(int b1, int b2, int out);
  std::optional<int> lookup(int b1, int b2) const {
    const int v = out_[index(b1, b2)];
    return v < 0 ? std::nullopt : std::optional<int>(v);
  }
  bool total() const;
  int max_color() const;

  /// Rows sorted by (b1, b2); absent combinations are omitted.
  std::vector<std::array<int, 3>> rows() const;

  bool operator==(const ColorRule& other) const = default;

 private:
  static int index(int b1, int b2) { return b1 * 2 + b2; }
  std::array<int, 4> out_ = {-1, -1, -1, -1};
};

/// Combines two bands pixelwise through the rule. Bands must share
/// dimensions. Throws IncompleteRuleError when a combination that occurs in
/// the bands has no row. The output image is given num_colors capacity for
/// the largest rule colour (at least min_colors).
Image apply_color_rule(const BinaryBand& band1, const BinaryBand& band2, const ColorRule& rule,
                       int min_colors = 2);

}  // namespace iparc
