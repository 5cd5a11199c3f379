#pragma once

// Brute-force reference implementations of the morphological operators,
// written directly from their set definitions. They quantify over every SE
// placement per pixel, independently of the production code paths, and exist
// only to check those paths on small instances.

#include <utility>
#include <vector>

#include "iparc/band.hpp"
#include "iparc/rng.hpp"
#include "iparc/se.hpp"

namespace oracle {

// Union of SE stampings over all foreground pixels.
inline iparc::BinaryBand dilate_ref(const iparc::BinaryBand& band,
                                    const iparc::StructuringElement& se) {
  iparc::BinaryBand out(band.width(), band.height());
  for (int r = 0; r < band.height(); ++r)
    for (int c = 0; c < band.width(); ++c) {
      if (!band.at(r, c)) continue;
      for (const auto& [dr, dc] : se.fg_offsets()) {
        const int rr = r + dr, cc = c + dc;
        if (rr >= 0 && rr < band.height() && cc >= 0 && cc < band.width())
          out.set(rr, cc, true);
      }
    }
  return out;
}

// Pixels where every FG cell of the SE lands on foreground.
inline iparc::BinaryBand erode_ref(const iparc::BinaryBand& band,
                                   const iparc::StructuringElement& se) {
  iparc::BinaryBand out(band.width(), band.height());
  for (int r = 0; r < band.height(); ++r)
    for (int c = 0; c < band.width(); ++c) {
      bool fits = true;
      for (const auto& [dr, dc] : se.fg_offsets())
        if (!band.at(r + dr, c + dc)) {  // outside the grid reads background
          fits = false;
          break;
        }
      out.set(r, c, fits);
    }
  return out;
}

// Template match: FG cells on foreground and BG cells on background.
inline iparc::BinaryBand hit_or_miss_ref(const iparc::BinaryBand& band,
                                         const iparc::StructuringElement& se) {
  iparc::BinaryBand out(band.width(), band.height());
  for (int r = 0; r < band.height(); ++r)
    for (int c = 0; c < band.width(); ++c) {
      bool match = true;
      for (const auto& [dr, dc] : se.fg_offsets())
        if (!band.at(r + dr, c + dc)) {
          match = false;
          break;
        }
      if (match)
        for (const auto& [dr, dc] : se.bg_offsets())
          if (band.at(r + dr, c + dc)) {
            match = false;
            break;
          }
      out.set(r, c, match);
    }
  return out;
}

inline iparc::BinaryBand random_band(iparc::Rng& rng, int width, int height,
                                     double density = 0.4) {
  iparc::BinaryBand band(width, height);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      if (rng.chance(density)) band.set(r, c, true);
  return band;
}

// A random SE with odd dimensions <= 3. With allow_bg, cells may also be BG
// (hit-or-miss templates); otherwise cells are FG or DontCare with at least
// one FG cell.
inline iparc::StructuringElement random_se(iparc::Rng& rng, bool allow_bg,
                                           bool force_fg_origin = false) {
  const int rows = 1 + 2 * rng.below_int(2);
  const int cols = 1 + 2 * rng.below_int(2);
  std::vector<iparc::SeCell> cells(static_cast<size_t>(rows) * cols);
  bool has_fg = false;
  for (auto& cell : cells) {
    const int pick = rng.below_int(allow_bg ? 3 : 2);
    cell = pick == 0   ? iparc::SeCell::Fg
           : pick == 1 ? iparc::SeCell::DontCare
                       : iparc::SeCell::Bg;
    has_fg = has_fg || cell == iparc::SeCell::Fg;
  }
  const size_t origin_index = static_cast<size_t>(rows / 2) * cols + cols / 2;
  if (force_fg_origin || !has_fg) cells[origin_index] = iparc::SeCell::Fg;
  return iparc::StructuringElement("T", rows, cols, std::move(cells));
}

}  // namespace oracle
