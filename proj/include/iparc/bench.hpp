#pragma once

#include <string>
#include <vector>

#include "iparc/synth.hpp"
#include "iparc/task.hpp"
#include "iparc/taskgen.hpp"

namespace iparc {

struct TaskOutcome {
  std::string id;
  Category category = Category::ASimple;
  bool solved = false;
  std::string program_text;  // empty when unsolved
  std::string error;         // non-empty when the task failed to run at all
  SearchStats stats;
};

struct CategoryRow {
  Category category = Category::ASimple;
  int attempted = 0;
  int solved = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double mean_tested = 0.0;
  double mean_reduction = 1.0;
};

/// Bench results: one outcome per task in manifest order, aggregated rows per
/// category, and the full effective config so any row is replayable.
struct BenchReport {
  std::vector<TaskOutcome> tasks;
  std::vector<CategoryRow> rows;
  SynthConfig config;
  bool used_snapshots = false;
  int jobs = 1;
};

/// Runs solve over every task of a suite. Tasks may run on `jobs` worker
/// threads; report order is manifest order regardless of completion order.
/// With use_snapshots, tasks carrying snapshots go through snapshot
/// splitting; otherwise snapshots are ignored.
BenchReport run_bench(const std::string& suite_dir, const SynthConfig& cfg, bool use_snapshots,
                      int jobs);

/// Aligned text table, one row per category.
std::string bench_report_table(const BenchReport& report);

std::string bench_report_to_json(const BenchReport& report);
BenchReport bench_report_from_json(const std::string& text);

}  // namespace iparc
