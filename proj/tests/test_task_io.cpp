#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "iparc/errors.hpp"
#include "iparc/rng.hpp"
#include "iparc/task.hpp"
#include "iparc/taskgen.hpp"

using namespace iparc;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / ("iparc-io-" + std::to_string(::getpid()) + "-" + name))
      .string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("a minimal task file loads") {
  const Task task = parse_task_json(R"({
    "id": "t0",
    "category": "A-simple",
    "num_colors": 2,
    "pairs": [{"input": [[0, 1], [1, 0]], "output": [[1, 0], [0, 1]]}]
  })");
  CHECK(task.id == "t0");
  CHECK(task.category == Category::ASimple);
  CHECK(task.pairs.size() == 1);
  CHECK(task.pairs[0].input.width == 2);
  CHECK(task.pairs[0].input.at(0, 1) == 1);
  CHECK(!task.ground_truth.has_value());
}

TEST_CASE("dimension mismatches are reported with the pair path") {
  try {
    parse_task_json(R"({
      "id": "t1", "category": "A-simple", "num_colors": 2,
      "pairs": [{"input": [[0, 1]], "output": [[1, 0], [0, 1]]}]
    })");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(!e.violations().empty());
    CHECK(e.violations()[0].code == Violation::Code::DimMismatch);
    CHECK(e.violations()[0].path == "pairs[0].output");
  }
}

TEST_CASE("schema errors name the offending field") {
  CHECK_THROWS_AS(parse_task_json("{not json"), SchemaError);
  CHECK_THROWS_AS(parse_task_json(R"({"id": "x"})"), SchemaError);
  CHECK_THROWS_AS(parse_task_json(R"({
    "id": "x", "category": "C-weird", "num_colors": 2,
    "pairs": [{"input": [[0]], "output": [[0]]}]
  })"),
                  SchemaError);
  CHECK_THROWS_AS(parse_task_json(R"({
    "id": "x", "category": "A-simple", "num_colors": 2,
    "pairs": [{"input": [[0], [0, 0]], "output": [[0]]}]
  })"),
                  SchemaError);
}

TEST_CASE("validate_task flags colour range and snapshot count issues") {
  Task task;
  task.id = "v";
  task.category = Category::ASimple;
  task.num_colors = 2;
  TaskPair pair;
  pair.input = Image(2, 2, 2);
  pair.output = Image(2, 2, 2);
  task.pairs.push_back(pair);
  CHECK(validate_task(task).empty());

  Task bad_color = task;
  bad_color.pairs[0].input.at(0, 0) = 2;
  const auto violations = validate_task(bad_color);
  REQUIRE(!violations.empty());
  CHECK(violations[0].code == Violation::Code::ColorOutOfRange);
  CHECK(violations[0].path == "pairs[0].input");

  Task bad_snaps = task;
  bad_snaps.pairs.push_back(pair);
  bad_snaps.pairs[1].snapshots.push_back(Image(2, 2, 2));
  bool found = false;
  for (const auto& v : validate_task(bad_snaps))
    found = found || v.code == Violation::Code::SnapshotCountMismatch;
  CHECK(found);

  Task empty;
  empty.num_colors = 2;
  bool empty_code = false;
  for (const auto& v : validate_task(empty))
    empty_code = empty_code || v.code == Violation::Code::EmptyPairs;
  CHECK(empty_code);
}

TEST_CASE("missing files raise io errors") {
  CHECK_THROWS_AS(load_task("/nonexistent/task.json"), IoError);
}

TEST_CASE("save/load round trip over generated tasks") {
  const SELibrary lib = default_se_library();
  GenParams params;
  params.seed = 7;
  params.grid_width = 9;
  params.grid_height = 9;
  const std::string path = temp_path("roundtrip.json");

  int done = 0;
  for (Category category : kAllCategories) {
    GenParams p = params;
    p.emit_snapshots = category == Category::ASimple || category == Category::AHard;
    for (const Task& task : generate_suite(category, 17, p, lib)) {
      save_task(task, path);
      const Task back = load_task(path);
      CHECK(back == task);
      ++done;
    }
  }
  CHECK(done == 17 * 6);
  fs::remove(path);
}

TEST_CASE("saving is byte-deterministic and stores the solution as program text") {
  const SELibrary lib = default_se_library();
  GenParams params;
  params.seed = 99;
  params.grid_width = 9;
  params.grid_height = 9;
  const Task task = generate_suite(Category::BHard, 1, params, lib)[0];
  REQUIRE(task.ground_truth.has_value());

  const std::string path_a = temp_path("a.json");
  const std::string path_b = temp_path("b.json");
  save_task(task, path_a);
  save_task(task, path_b);
  const std::string bytes_a = read_file(path_a);
  CHECK(bytes_a == read_file(path_b));
  CHECK(bytes_a.find("\"solution\"") != std::string::npos);
  CHECK(bytes_a.find("Hit-Or-Miss") != std::string::npos);
  fs::remove(path_a);
  fs::remove(path_b);
}
