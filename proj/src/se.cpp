#include "iparc/se.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "iparc/errors.hpp"

namespace iparc {

StructuringElement::StructuringElement(std::string id, int rows, int cols,
                                       std::vector<SeCell> pattern,
                                       std::optional<std::pair<int, int>> origin)
    : id_(std::move(id)), rows_(rows), cols_(cols), pattern_(std::move(pattern)) {
  if (rows_ < 1 || cols_ < 1 || rows_ > 5 || cols_ > 5 || rows_ % 2 == 0 || cols_ % 2 == 0)
    throw std::invalid_argument("SE '" + id_ + "': dimensions must be odd and at most 5");
  if (pattern_.size() != static_cast<size_t>(rows_) * cols_)
    throw std::invalid_argument("SE '" + id_ + "': pattern size does not match dimensions");
  if (origin) {
    origin_row_ = origin->first;
    origin_col_ = origin->second;
  } else {
    origin_row_ = rows_ / 2;
    origin_col_ = cols_ / 2;
  }
  if (origin_row_ < 0 || origin_row_ >= rows_ || origin_col_ < 0 || origin_col_ >= cols_)
    throw std::invalid_argument("SE '" + id_ + "': origin outside the matrix");
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) {
      const auto off = std::make_pair(r - origin_row_, c - origin_col_);
      if (cell(r, c) == SeCell::Fg) fg_offsets_.push_back(off);
      if (cell(r, c) == SeCell::Bg) bg_offsets_.push_back(off);
    }
  if (fg_offsets_.empty())
    throw std::invalid_argument("SE '" + id_ + "': at least one FG cell is required");
}

StructuringElement StructuringElement::from_strings(std::string id,
                                                    const std::vector<std::string>& rows,
                                                    std::optional<std::pair<int, int>> origin) {
  if (rows.empty()) throw std::invalid_argument("SE '" + id + "': empty pattern");
  const int nr = static_cast<int>(rows.size());
  const int nc = static_cast<int>(rows[0].size());
  std::vector<SeCell> cells;
  cells.reserve(static_cast<size_t>(nr) * nc);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != nc)
      throw std::invalid_argument("SE '" + id + "': ragged pattern rows");
    for (char ch : row) {
      switch (ch) {
        case '#': cells.push_back(SeCell::Fg); break;
        case '.': cells.push_back(SeCell::Bg); break;
        case '?': cells.push_back(SeCell::DontCare); break;
        default:
          throw std::invalid_argument("SE '" + id + "': bad pattern char '" + std::string(1, ch) +
                                      "' (want '#', '.' or '?')");
      }
    }
  }
  return StructuringElement(std::move(id), nr, nc, std::move(cells), origin);
}

StructuringElement StructuringElement::reflected() const {
  std::vector<SeCell> flipped(pattern_.size());
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      flipped[static_cast<size_t>(rows_ - 1 - r) * cols_ + (cols_ - 1 - c)] =
          pattern_[static_cast<size_t>(r) * cols_ + c];
  return StructuringElement(id_ + "~", rows_, cols_, std::move(flipped),
                            std::make_pair(rows_ - 1 - origin_row_, cols_ - 1 - origin_col_));
}

void SELibrary::add(StructuringElement se) {
  if (index_.count(se.id()))
    throw std::invalid_argument("duplicate SE id '" + se.id() + "'");
  index_.emplace(se.id(), elements_.size());
  elements_.push_back(std::move(se));
}

const StructuringElement* SELibrary::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &elements_[it->second];
}

const StructuringElement& SELibrary::at(const std::string& id) const {
  const StructuringElement* se = find(id);
  if (!se) throw UnresolvedSeError(id);
  return *se;
}

std::vector<std::string> SELibrary::ids() const {
  std::vector<std::string> out;
  out.reserve(elements_.size());
  for (const auto& se : elements_) out.push_back(se.id());
  return out;
}

bool SELibrary::all_origins_fg() const {
  for (const auto& se : elements_)
    if (!se.origin_is_fg()) return false;
  return true;
}

SELibrary default_se_library() {
  SELibrary lib;
  lib.add(StructuringElement::from_strings("SE1", {"#"}));
  lib.add(StructuringElement::from_strings("SE2", {"###",  //
                                                   "###",  //
                                                   "###"}));
  lib.add(StructuringElement::from_strings("SE3", {".#.",  //
                                                   "###",  //
                                                   ".#."}));
  lib.add(StructuringElement::from_strings("SE4", {"#..",  //
                                                   ".#.",  //
                                                   "..#"}));
  lib.add(StructuringElement::from_strings("SE5", {"..#",  //
                                                   ".#.",  //
                                                   "#.."}));
  lib.add(StructuringElement::from_strings("SE6", {"???",  //
                                                   "###",  //
                                                   "???"}));
  lib.add(StructuringElement::from_strings("SE7", {"?#?",  //
                                                   "?#?",  //
                                                   "?#?"}));
  lib.add(StructuringElement::from_strings("SE8", {"#.#",  //
                                                   ".#.",  //
                                                   "#.#"}));
  return lib;
}

SELibrary load_se_library(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open SE library file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("ses") || !doc["ses"].is_array())
    throw SchemaError(path, "expected an object with an \"ses\" array");
  SELibrary lib;
  size_t idx = 0;
  for (const auto& entry : doc["ses"]) {
    const std::string where = path + ": ses[" + std::to_string(idx++) + "]";
    if (!entry.is_object() || !entry.contains("id") || !entry.contains("pattern"))
      throw SchemaError(where, "each entry needs \"id\" and \"pattern\"");
    std::vector<std::string> rows;
    for (const auto& row : entry["pattern"]) {
      std::string s;
      for (const auto& cell : row) s += cell.get<std::string>();
      rows.push_back(s);
    }
    std::optional<std::pair<int, int>> origin;
    if (entry.contains("origin")) {
      const auto& o = entry["origin"];
      if (!o.is_array() || o.size() != 2) throw SchemaError(where, "\"origin\" must be [row, col]");
      origin = std::make_pair(o[0].get<int>(), o[1].get<int>());
    }
    try {
      lib.add(StructuringElement::from_strings(entry["id"].get<std::string>(), rows, origin));
    } catch (const std::invalid_argument& e) {
      throw SchemaError(where, e.what());
    }
  }
  return lib;
}

}  // namespace iparc
