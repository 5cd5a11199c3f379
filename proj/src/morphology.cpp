#include "iparc/morphology.hpp"

#include <algorithm>
#include <stdexcept>

#include "iparc/errors.hpp"

namespace iparc {
namespace {

// Reads word i of a row that is conceptually extended with `fill` bits both
// beyond the row's words and past the grid width.
inline uint64_t read_word(const uint64_t* row, int wpr, uint64_t tail_mask, int i, bool fill) {
  if (i < 0 || i >= wpr) return fill ? ~0ull : 0ull;
  uint64_t w = row[i];
  if (fill && i == wpr - 1) w |= ~tail_mask;
  return w;
}

// Accumulates `src_row` shifted by `shift` columns into `dst` with `combine`
// (true: OR, false: AND). Positive shift moves content toward higher columns.
// Bits shifted in take the value `fill`.
inline void accumulate_shifted(uint64_t* dst, const uint64_t* src_row, int wpr,
                               uint64_t tail_mask, int shift, bool fill, bool combine_or) {
  const int word_shift = shift >= 0 ? shift / 64 : -((-shift + 63) / 64);
  const int bit_shift = shift - word_shift * 64;  // 0..63
  for (int i = 0; i < wpr; ++i) {
    const uint64_t lo = read_word(src_row, wpr, tail_mask, i - word_shift, fill);
    uint64_t v;
    if (bit_shift == 0) {
      v = lo;
    } else {
      const uint64_t below = read_word(src_row, wpr, tail_mask, i - word_shift - 1, fill);
      v = (lo << bit_shift) | (below >> (64 - bit_shift));
    }
    if (i == wpr - 1) v &= tail_mask;
    if (combine_or)
      dst[i] |= v;
    else
      dst[i] &= (i == wpr - 1) ? (v | ~tail_mask) : v;
  }
}

// AND-accumulates an all-`fill` row into dst (used when the source row lies
// outside the grid).
inline void accumulate_constant(uint64_t* dst, int wpr, uint64_t tail_mask, bool fill,
                                bool combine_or) {
  if (combine_or) {
    if (!fill) return;
    for (int i = 0; i + 1 < wpr; ++i) dst[i] = ~0ull;
    dst[wpr - 1] |= tail_mask;
  } else {
    if (fill) return;
    for (int i = 0; i < wpr; ++i) dst[i] = 0;
  }
}

}  // namespace

BinaryBand dilate(const BinaryBand& band, const StructuringElement& se) {
  BinaryBand out(band.width(), band.height());
  const int wpr = band.words_per_row();
  const uint64_t tail = band.tail_mask();
  for (const auto& [dr, dc] : se.fg_offsets()) {
    for (int r = 0; r < band.height(); ++r) {
      const int src = r - dr;
      if (src < 0 || src >= band.height()) continue;
      accumulate_shifted(out.row(r), band.row(src), wpr, tail, dc, false, true);
    }
  }
  return out;
}

BinaryBand erode(const BinaryBand& band, const StructuringElement& se) {
  BinaryBand out(band.width(), band.height(), true);
  const int wpr = band.words_per_row();
  const uint64_t tail = band.tail_mask();
  for (const auto& [dr, dc] : se.fg_offsets()) {
    for (int r = 0; r < band.height(); ++r) {
      const int src = r + dr;
      if (src < 0 || src >= band.height())
        accumulate_constant(out.row(r), wpr, tail, false, false);
      else
        accumulate_shifted(out.row(r), band.row(src), wpr, tail, -dc, false, false);
    }
  }
  return out;
}

BinaryBand hit_or_miss(const BinaryBand& band, const StructuringElement& se) {
  BinaryBand out(band.width(), band.height(), true);
  const int wpr = band.words_per_row();
  const uint64_t tail = band.tail_mask();
  for (const auto& [dr, dc] : se.fg_offsets()) {
    for (int r = 0; r < band.height(); ++r) {
      const int src = r + dr;
      if (src < 0 || src >= band.height())
        accumulate_constant(out.row(r), wpr, tail, false, false);
      else
        accumulate_shifted(out.row(r), band.row(src), wpr, tail, -dc, false, false);
    }
  }
  const BinaryBand inv = band.complement();
  for (const auto& [dr, dc] : se.bg_offsets()) {
    for (int r = 0; r < band.height(); ++r) {
      const int src = r + dr;
      if (src < 0 || src >= band.height())
        accumulate_constant(out.row(r), wpr, tail, true, false);
      else
        accumulate_shifted(out.row(r), inv.row(src), wpr, tail, -dc, true, false);
    }
  }
  return out;
}

Image hit_or_miss_colored(const Image& img, const StructuringElement& se) {
  const BinaryBand fg = foreground_band(img);
  const BinaryBand mask = hit_or_miss(fg, se);
  Image out = indicator_image(fg, std::max(img.num_colors, 3));
  for (int r = 0; r < out.height; ++r)
    for (int c = 0; c < out.width; ++c)
      if (mask.at(r, c)) out.at(r, c) = 2;
  return out;
}

BinaryBand extract_band(const Image& img, int colour) {
  if (colour < 0 || colour >= img.num_colors)
    throw std::invalid_argument("colour " + std::to_string(colour) + " outside [0, " +
                                std::to_string(img.num_colors) + ")");
  BinaryBand band(img.width, img.height);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      if (img.at(r, c) == colour) band.set(r, c, true);
  return band;
}

ColorRule::ColorRule(const std::vector<std::array<int, 3>>& rows) {
  for (const auto& row : rows) {
    const auto [b1, b2, out] = row;
    if (b1 < 0 || b1 > 1 || b2 < 0 || b2 > 1)
      throw std::invalid_argument("colour rule band bits must be 0 or 1");
    if (out < 0) throw std::invalid_argument("colour rule output must be non-negative");
    if (out_[index(b1, b2)] >= 0)
      throw std::invalid_argument("duplicate colour rule row for (" + std::to_string(b1) + ", " +
                                  std::to_string(b2) + ")");
    out_[index(b1, b2)] = out;
  }
}

ColorRule ColorRule::constant_zero() {
  ColorRule rule;
  rule.out_ = {0, 0, 0, 0};
  return rule;
}

void ColorRule::set(int b1, int b2, int out) { out_[index(b1, b2)] = out; }

bool ColorRule::total() const {
  return std::all_of(out_.begin(), out_.end(), [](int v) { return v >= 0; });
}

int ColorRule::max_color() const { return *std::max_element(out_.begin(), out_.end()); }

std::vector<std::array<int, 3>> ColorRule::rows() const {
  std::vector<std::array<int, 3>> out;
  for (int b1 = 0; b1 <= 1; ++b1)
    for (int b2 = 0; b2 <= 1; ++b2)
      if (out_[index(b1, b2)] >= 0) out.push_back({b1, b2, out_[index(b1, b2)]});
  return out;
}

Image apply_color_rule(const BinaryBand& band1, const BinaryBand& band2, const ColorRule& rule,
                       int min_colors) {
  if (band1.width() != band2.width() || band1.height() != band2.height())
    throw std::invalid_argument("colour rule bands must share dimensions");
  const int k = std::max(min_colors, rule.max_color() + 1);
  Image out(band1.width(), band1.height(), k);
  for (int r = 0; r < out.height; ++r)
    for (int c = 0; c < out.width; ++c) {
      const int b1 = band1.at(r, c) ? 1 : 0;
      const int b2 = band2.at(r, c) ? 1 : 0;
      const auto colour = rule.lookup(b1, b2);
      if (!colour) throw IncompleteRuleError(b1, b2);
      out.at(r, c) = *colour;
    }
  return out;
}

}  // namespace iparc
