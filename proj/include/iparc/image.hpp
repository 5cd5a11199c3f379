#pragma once

#include <vector>

#include "iparc/band.hpp"

namespace iparc {

/// A rectangular grid where each cell holds one of num_colors colour values.
/// Cells are row-major. Equality compares dimensions and cells; num_colors is
/// capacity metadata and does not participate.
struct Image {
  int width = 0;
  int height = 0;
  int num_colors = 2;
  std::vector<int> cells;

  Image() = default;
  Image(int w, int h, int k, int fill = 0)
      : width(w), height(h), num_colors(k), cells(static_cast<size_t>(w) * h, fill) {}

  int at(int r, int c) const { return cells[static_cast<size_t>(r) * width + c]; }
  int& at(int r, int c) { return cells[static_cast<size_t>(r) * width + c]; }

  bool same_dims(const Image& other) const {
    return width == other.width && height == other.height;
  }

  bool operator==(const Image& other) const {
    return width == other.width && height == other.height && cells == other.cells;
  }

  /// True when dimensions are positive, the cell count matches and every
  /// value lies in [0, num_colors).
  bool well_formed() const {
    if (width < 1 || height < 1 || num_colors < 2) return false;
    if (cells.size() != static_cast<size_t>(width) * height) return false;
    for (int v : cells)
      if (v < 0 || v >= num_colors) return false;
    return true;
  }
};

/// Foreground of an image: every cell with value >= 1.
BinaryBand foreground_band(const Image& img);

/// Indicator image of a band: 1 on foreground, 0 elsewhere.
Image indicator_image(const BinaryBand& band, int num_colors);

}  // namespace iparc
