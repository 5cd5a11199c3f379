#include "iparc/band.hpp"

#include <stdexcept>

namespace iparc {

BinaryBand::BinaryBand(int width, int height, bool fill) : w_(width), h_(height) {
  if (width < 1 || height < 1) throw std::invalid_argument("band dimensions must be positive");
  wpr_ = (width + 63) / 64;
  const int tail_bits = width - (wpr_ - 1) * 64;
  tail_mask_ = tail_bits == 64 ? ~0ull : (1ull << tail_bits) - 1;
  words_.assign(static_cast<size_t>(h_) * wpr_, 0);
  if (fill) {
    for (int r = 0; r < h_; ++r) {
      uint64_t* row_words = row(r);
      for (int i = 0; i + 1 < wpr_; ++i) row_words[i] = ~0ull;
      row_words[wpr_ - 1] = tail_mask_;
    }
  }
}

int BinaryBand::popcount() const {
  int n = 0;
  for (uint64_t w : words_) n += std::popcount(w);
  return n;
}

bool BinaryBand::none() const {
  for (uint64_t w : words_)
    if (w) return false;
  return true;
}

bool BinaryBand::all() const { return popcount() == w_ * h_; }

bool BinaryBand::covers(const BinaryBand& other) const {
  for (size_t i = 0; i < words_.size(); ++i)
    if (other.words_[i] & ~words_[i]) return false;
  return true;
}

bool BinaryBand::intersects(const BinaryBand& other) const {
  for (size_t i = 0; i < words_.size(); ++i)
    if (other.words_[i] & words_[i]) return true;
  return false;
}

BinaryBand& BinaryBand::operator|=(const BinaryBand& other) {
  for (size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

BinaryBand& BinaryBand::operator&=(const BinaryBand& other) {
  for (size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

BinaryBand& BinaryBand::subtract(const BinaryBand& other) {
  for (size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

BinaryBand BinaryBand::complement() const {
  BinaryBand out(w_, h_);
  for (int r = 0; r < h_; ++r) {
    const uint64_t* src = row(r);
    uint64_t* dst = out.row(r);
    for (int i = 0; i + 1 < wpr_; ++i) dst[i] = ~src[i];
    dst[wpr_ - 1] = ~src[wpr_ - 1] & tail_mask_;
  }
  return out;
}

void BinaryBand::append_key(std::string& out) const {
  // Bits are repacked without row padding so keys stay small.
  uint8_t acc = 0;
  int nbits = 0;
  for (int r = 0; r < h_; ++r)
    for (int c = 0; c < w_; ++c) {
      acc = static_cast<uint8_t>(acc | (static_cast<uint8_t>(at(r, c)) << nbits));
      if (++nbits == 8) {
        out.push_back(static_cast<char>(acc));
        acc = 0;
        nbits = 0;
      }
    }
  if (nbits) out.push_back(static_cast<char>(acc));
}

}  // namespace iparc
