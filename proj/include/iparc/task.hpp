#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iparc/errors.hpp"
#include "iparc/image.hpp"
#include "iparc/program.hpp"

namespace iparc {

enum class Category { ASimple, AHard, BSequence, BSelection, BIteration, BHard };

constexpr Category kAllCategories[] = {Category::ASimple,    Category::AHard,
                                       Category::BSequence,  Category::BSelection,
                                       Category::BIteration, Category::BHard};

/// Schema names: "A-simple", "A-hard", "B-sequence", "B-selection",
/// "B-iteration", "B-hard".
std::string category_name(Category c);
std::optional<Category> category_from_name(const std::string& name);

/// One input-output example, with optional intermediate checkpoint images.
struct TaskPair {
  Image input;
  Image output;
  std::vector<Image> snapshots;

  bool operator==(const TaskPair&) const = default;
};

struct Task {
  std::string id;
  Category category = Category::ASimple;
  int num_colors = 2;
  std::vector<TaskPair> pairs;
  /// Present only on generated tasks.
  std::optional<MorphProgram> ground_truth;

  bool operator==(const Task&) const = default;
};

/// A machine-readable invariant violation with the path of the offending
/// field, e.g. {COLOR_OUT_OF_RANGE, "pairs[2].input"}.
struct Violation {
  enum class Code {
    EmptyPairs,
    BadNumColors,
    BadGrid,
    DimMismatch,
    ColorOutOfRange,
    SnapshotCountMismatch,
  };
  Code code;
  std::string path;
  std::string message;
};

std::string violation_code_name(Violation::Code code);
std::string to_string(const Violation& v);

/// Empty iff every Task invariant holds: pairs non-empty, all grids share
/// dimensions, every cell < num_colors, snapshot counts equal across pairs.
std::vector<Violation> validate_task(const Task& task);

/// Loads and validates a task file. Throws IoError when the file cannot be
/// read, SchemaError when the JSON shape is wrong, and ValidationError when
/// the data violates Task invariants.
Task load_task(const std::string& path);

/// Parses a task from JSON text (exposed for tests and tools).
Task parse_task_json(const std::string& text, const std::string& origin = "<memory>");

/// Serialises a task; output bytes are deterministic for equal tasks. The
/// ground truth, when present, is stored as program text under "solution".
std::string task_to_json(const Task& task);
void save_task(const Task& task, const std::string& path);

/// Carries the violation list of a rejected task file.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

}  // namespace iparc
