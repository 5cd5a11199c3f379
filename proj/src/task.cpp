#include "iparc/task.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "iparc/errors.hpp"
#include "iparc/program_text.hpp"

namespace iparc {

using nlohmann::json;

std::string category_name(Category c) {
  switch (c) {
    case Category::ASimple: return "A-simple";
    case Category::AHard: return "A-hard";
    case Category::BSequence: return "B-sequence";
    case Category::BSelection: return "B-selection";
    case Category::BIteration: return "B-iteration";
    case Category::BHard: return "B-hard";
  }
  return "?";
}

std::optional<Category> category_from_name(const std::string& name) {
  for (Category c : kAllCategories)
    if (category_name(c) == name) return c;
  return std::nullopt;
}

std::string violation_code_name(Violation::Code code) {
  switch (code) {
    case Violation::Code::EmptyPairs: return "EMPTY_PAIRS";
    case Violation::Code::BadNumColors: return "BAD_NUM_COLORS";
    case Violation::Code::BadGrid: return "BAD_GRID";
    case Violation::Code::DimMismatch: return "DIM_MISMATCH";
    case Violation::Code::ColorOutOfRange: return "COLOR_OUT_OF_RANGE";
    case Violation::Code::SnapshotCountMismatch: return "SNAPSHOT_COUNT_MISMATCH";
  }
  return "?";
}

std::string to_string(const Violation& v) {
  return violation_code_name(v.code) + " at " + v.path + ": " + v.message;
}

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error([&violations] {
        std::string msg = "task validation failed:";
        for (const auto& v : violations) msg += "\n  " + to_string(v);
        return msg;
      }()),
      violations_(std::move(violations)) {}

namespace {

void check_grid(const Image& img, int num_colors, const std::string& path,
                std::vector<Violation>& out) {
  if (img.width < 1 || img.height < 1 ||
      img.cells.size() != static_cast<size_t>(img.width) * img.height) {
    out.push_back({Violation::Code::BadGrid, path, "grid must be a non-empty rectangle"});
    return;
  }
  for (int v : img.cells)
    if (v < 0 || v >= num_colors) {
      out.push_back({Violation::Code::ColorOutOfRange, path,
                     "cell value " + std::to_string(v) + " outside [0, " +
                         std::to_string(num_colors) + ")"});
      return;
    }
}

}  // namespace

std::vector<Violation> validate_task(const Task& task) {
  std::vector<Violation> out;
  if (task.num_colors < 2)
    out.push_back({Violation::Code::BadNumColors, "num_colors", "must be at least 2"});
  if (task.pairs.empty()) {
    out.push_back({Violation::Code::EmptyPairs, "pairs", "at least one pair is required"});
    return out;
  }
  const Image& ref = task.pairs[0].input;
  const size_t snapshot_count = task.pairs[0].snapshots.size();
  for (size_t i = 0; i < task.pairs.size(); ++i) {
    const std::string base = "pairs[" + std::to_string(i) + "]";
    const TaskPair& pair = task.pairs[i];
    check_grid(pair.input, task.num_colors, base + ".input", out);
    check_grid(pair.output, task.num_colors, base + ".output", out);
    if (!pair.input.same_dims(pair.output))
      out.push_back({Violation::Code::DimMismatch, base + ".output",
                     "output dimensions differ from input"});
    if (!pair.input.same_dims(ref))
      out.push_back({Violation::Code::DimMismatch, base + ".input",
                     "pair dimensions differ from pair 0"});
    if (pair.snapshots.size() != snapshot_count)
      out.push_back({Violation::Code::SnapshotCountMismatch, base + ".snapshots",
                     "expected " + std::to_string(snapshot_count) + " snapshots, found " +
                         std::to_string(pair.snapshots.size())});
    for (size_t s = 0; s < pair.snapshots.size(); ++s) {
      const std::string spath = base + ".snapshots[" + std::to_string(s) + "]";
      check_grid(pair.snapshots[s], task.num_colors, spath, out);
      if (!pair.snapshots[s].same_dims(pair.input))
        out.push_back(
            {Violation::Code::DimMismatch, spath, "snapshot dimensions differ from input"});
    }
  }
  return out;
}

namespace {

Image grid_from_json(const json& j, int num_colors, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a non-empty array of rows");
  Image img;
  img.height = static_cast<int>(j.size());
  img.num_colors = num_colors;
  for (size_t r = 0; r < j.size(); ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.empty())
      throw SchemaError(path + "[" + std::to_string(r) + "]", "expected a non-empty row");
    if (r == 0) img.width = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != img.width)
      throw SchemaError(path + "[" + std::to_string(r) + "]", "ragged rows");
    for (const auto& cell : row) {
      if (!cell.is_number_integer())
        throw SchemaError(path + "[" + std::to_string(r) + "]", "cells must be integers");
      img.cells.push_back(cell.get<int>());
    }
  }
  return img;
}

json grid_to_json(const Image& img) {
  json rows = json::array();
  for (int r = 0; r < img.height; ++r) {
    json row = json::array();
    for (int c = 0; c < img.width; ++c) row.push_back(img.at(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

Task parse_task_json(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(origin, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError(origin, "expected a JSON object");
  for (const char* field : {"id", "category", "num_colors", "pairs"})
    if (!doc.contains(field)) throw SchemaError(origin, std::string("missing field \"") + field + "\"");

  Task task;
  if (!doc["id"].is_string()) throw SchemaError("id", "expected a string");
  task.id = doc["id"].get<std::string>();
  if (!doc["category"].is_string()) throw SchemaError("category", "expected a string");
  const auto category = category_from_name(doc["category"].get<std::string>());
  if (!category)
    throw SchemaError("category", "unknown category '" + doc["category"].get<std::string>() + "'");
  task.category = *category;
  if (!doc["num_colors"].is_number_integer()) throw SchemaError("num_colors", "expected an integer");
  task.num_colors = doc["num_colors"].get<int>();
  if (!doc["pairs"].is_array()) throw SchemaError("pairs", "expected an array");

  size_t i = 0;
  for (const auto& p : doc["pairs"]) {
    const std::string base = "pairs[" + std::to_string(i++) + "]";
    if (!p.is_object() || !p.contains("input") || !p.contains("output"))
      throw SchemaError(base, "each pair needs \"input\" and \"output\" grids");
    TaskPair pair;
    pair.input = grid_from_json(p["input"], task.num_colors, base + ".input");
    pair.output = grid_from_json(p["output"], task.num_colors, base + ".output");
    if (p.contains("snapshots")) {
      if (!p["snapshots"].is_array()) throw SchemaError(base + ".snapshots", "expected an array");
      size_t s = 0;
      for (const auto& snap : p["snapshots"])
        pair.snapshots.push_back(grid_from_json(
            snap, task.num_colors, base + ".snapshots[" + std::to_string(s++) + "]"));
    }
    task.pairs.push_back(std::move(pair));
  }

  if (doc.contains("solution")) {
    if (!doc["solution"].is_string()) throw SchemaError("solution", "expected program text");
    task.ground_truth = parse_program(doc["solution"].get<std::string>());
  }

  auto violations = validate_task(task);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return task;
}

Task load_task(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open task file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_task_json(buf.str(), path);
}

std::string task_to_json(const Task& task) {
  json doc;
  doc["id"] = task.id;
  doc["category"] = category_name(task.category);
  doc["num_colors"] = task.num_colors;
  json pairs = json::array();
  for (const auto& pair : task.pairs) {
    json p;
    p["input"] = grid_to_json(pair.input);
    p["output"] = grid_to_json(pair.output);
    if (!pair.snapshots.empty()) {
      json snaps = json::array();
      for (const auto& s : pair.snapshots) snaps.push_back(grid_to_json(s));
      p["snapshots"] = snaps;
    }
    pairs.push_back(p);
  }
  doc["pairs"] = pairs;
  if (task.ground_truth) doc["solution"] = print_program(*task.ground_truth);
  return doc.dump(1) + "\n";
}

void save_task(const Task& task, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write task file '" + path + "'");
  out << task_to_json(task);
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace iparc
