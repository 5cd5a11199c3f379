#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace iparc {

enum class SeCell : uint8_t { Bg, Fg, DontCare };

/// A small pattern matrix with an origin. The same element parameterises
/// dilation and erosion (only FG cells are consulted) and hit-or-miss (FG is
/// the foreground template, BG the background template, DontCare is free).
class StructuringElement {
 public:
  /// pattern is row-major, rows*cols entries. Dimensions must be odd and at
  /// most 5; at least one cell must be FG; the origin must lie inside.
  StructuringElement(std::string id, int rows, int cols, std::vector<SeCell> pattern,
                     std::optional<std::pair<int, int>> origin = std::nullopt);

  /// Builds from a row-per-string spec: '#' = FG, '.' = BG, '?' = DontCare.
  static StructuringElement from_strings(std::string id, const std::vector<std::string>& rows,
                                         std::optional<std::pair<int, int>> origin = std::nullopt);

  const std::string& id() const { return id_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int origin_row() const { return origin_row_; }
  int origin_col() const { return origin_col_; }
  SeCell cell(int r, int c) const { return pattern_[static_cast<size_t>(r) * cols_ + c]; }

  bool origin_is_fg() const {
    return cell(origin_row_, origin_col_) == SeCell::Fg;
  }

  /// Offsets of FG (resp. BG) cells relative to the origin, as (dr, dc).
  const std::vector<std::pair<int, int>>& fg_offsets() const { return fg_offsets_; }
  const std::vector<std::pair<int, int>>& bg_offsets() const { return bg_offsets_; }

  /// The element rotated 180 degrees about its origin.
  StructuringElement reflected() const;

 private:
  std::string id_;
  int rows_, cols_;
  int origin_row_, origin_col_;
  std::vector<SeCell> pattern_;
  std::vector<std::pair<int, int>> fg_offsets_, bg_offsets_;
};

/// Ordered collection of structuring elements. Iteration order is insertion
/// order; search determinism depends on it.
class SELibrary {
 public:
  void add(StructuringElement se);

  const StructuringElement* find(const std::string& id) const;
  /// Like find, but throws UnresolvedSeError when the id is unknown.
  const StructuringElement& at(const std::string& id) const;

  size_t size() const { return elements_.size(); }
  const StructuringElement& operator[](size_t i) const { return elements_[i]; }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  std::vector<std::string> ids() const;
  /// True when every element has a foreground origin (required by the
  /// pruning rules).
  bool all_origins_fg() const;

 private:
  std::vector<StructuringElement> elements_;
  std::unordered_map<std::string, size_t> index_;
};

/// The artifact's fixed default library SE1..SE8 (3x3 or embedded shapes,
/// foreground origins throughout). Overridable from a JSON config file.
SELibrary default_se_library();

/// Loads {"ses": [{"id": ..., "pattern": [["#",".","?"],...], "origin": [r,c]?}]}.
/// Origin defaults to the centre cell.
SELibrary load_se_library(const std::string& path);

}  // namespace iparc
