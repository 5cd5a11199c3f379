#include "iparc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>
#include <thread>

#include "iparc/errors.hpp"
#include "iparc/program_text.hpp"

namespace iparc {

using nlohmann::json;

namespace {

TaskOutcome run_one(const Task& task, const SynthConfig& cfg, const SELibrary& lib,
                    bool use_snapshots) {
  TaskOutcome outcome;
  outcome.id = task.id;
  outcome.category = task.category;
  try {
    const bool with_snapshots =
        use_snapshots && !task.pairs.empty() && !task.pairs[0].snapshots.empty();
    SolveResult result =
        with_snapshots ? solve_with_snapshots(task, cfg, lib) : solve(task, cfg, lib);
    outcome.stats = result.stats;
    outcome.solved = result.program.has_value();
    if (result.program) outcome.program_text = print_program(*result.program);
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::vector<CategoryRow> aggregate(const std::vector<TaskOutcome>& outcomes) {
  std::vector<CategoryRow> rows;
  for (Category category : kAllCategories) {
    CategoryRow row;
    row.category = category;
    std::vector<double> times;
    double tested = 0.0, reduction = 0.0;
    for (const auto& outcome : outcomes) {
      if (outcome.category != category) continue;
      ++row.attempted;
      if (outcome.solved) ++row.solved;
      times.push_back(static_cast<double>(outcome.stats.elapsed.count()));
      tested += static_cast<double>(outcome.stats.candidates_tested);
      reduction += outcome.stats.reduction_factor();
    }
    if (row.attempted == 0) continue;
    row.mean_ms = std::accumulate(times.begin(), times.end(), 0.0) / row.attempted;
    row.median_ms = median(times);
    row.mean_tested = tested / row.attempted;
    row.mean_reduction = reduction / row.attempted;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

BenchReport run_bench(const std::string& suite_dir, const SynthConfig& cfg, bool use_snapshots,
                      int jobs) {
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  const SuiteManifest manifest = load_manifest(suite_dir);
  const SELibrary lib = default_se_library();

  std::vector<Task> tasks;
  tasks.reserve(manifest.tasks.size());
  for (const auto& [id, file] : manifest.tasks)
    tasks.push_back(load_task((std::filesystem::path(suite_dir) / file).string()));

  BenchReport report;
  report.config = cfg;
  report.used_snapshots = use_snapshots;
  report.jobs = jobs;
  report.tasks.resize(tasks.size());

  // Workers pull task indices; results land in manifest order so the report
  // is independent of scheduling.
  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      const size_t idx = next.fetch_add(1);
      if (idx >= tasks.size()) return;
      report.tasks[idx] = run_one(tasks[idx], cfg, lib, use_snapshots);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < jobs; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  report.rows = aggregate(report.tasks);
  return report;
}

std::string bench_report_table(const BenchReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "Category" << std::right << std::setw(10) << "Attempted"
      << std::setw(8) << "Solved" << std::setw(14) << "Avg ms/task" << std::setw(14)
      << "Median ms" << std::setw(14) << "Avg tested" << std::setw(12) << "Reduction" << "\n";
  out << std::string(86, '-') << "\n";
  for (const auto& row : report.rows) {
    out << std::left << std::setw(14) << category_name(row.category) << std::right
        << std::setw(10) << row.attempted << std::setw(8) << row.solved << std::setw(14)
        << std::fixed << std::setprecision(1) << row.mean_ms << std::setw(14) << row.median_ms
        << std::setw(14) << std::setprecision(1) << row.mean_tested << std::setw(12)
        << std::setprecision(2) << row.mean_reduction << "\n";
  }
  out << "seed=" << report.config.seed << " pruning=" << (report.config.pruning_enabled ? "on" : "off")
      << " randomize=" << (report.config.randomization_enabled ? "on" : "off")
      << " snapshots=" << (report.used_snapshots ? "on" : "off") << " jobs=" << report.jobs
      << "\n";
  return out.str();
}

namespace {

json stats_to_json(const SearchStats& stats) {
  return json{{"enumerated", stats.candidates_enumerated},
              {"pruned", stats.candidates_pruned},
              {"tested", stats.candidates_tested},
              {"elapsed_ms", stats.elapsed.count()},
              {"solved", stats.solved},
              {"reduction_factor", stats.reduction_factor()}};
}

SearchStats stats_from_json(const json& j) {
  SearchStats stats;
  stats.candidates_enumerated = j.at("enumerated").get<uint64_t>();
  stats.candidates_pruned = j.at("pruned").get<uint64_t>();
  stats.candidates_tested = j.at("tested").get<uint64_t>();
  stats.elapsed = std::chrono::milliseconds(j.at("elapsed_ms").get<int64_t>());
  stats.solved = j.at("solved").get<bool>();
  return stats;
}

}  // namespace

std::string bench_report_to_json(const BenchReport& report) {
  json doc;
  doc["config"] = json::parse(synth_config_to_json(report.config));
  doc["used_snapshots"] = report.used_snapshots;
  doc["jobs"] = report.jobs;
  json tasks = json::array();
  for (const auto& t : report.tasks) {
    json entry;
    entry["id"] = t.id;
    entry["category"] = category_name(t.category);
    entry["solved"] = t.solved;
    entry["program"] = t.program_text;
    entry["error"] = t.error;
    entry["stats"] = stats_to_json(t.stats);
    tasks.push_back(entry);
  }
  doc["tasks"] = tasks;
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back(json{{"category", category_name(r.category)},
                        {"attempted", r.attempted},
                        {"solved", r.solved},
                        {"mean_ms", r.mean_ms},
                        {"median_ms", r.median_ms},
                        {"mean_tested", r.mean_tested},
                        {"mean_reduction", r.mean_reduction}});
  }
  doc["rows"] = rows;
  return doc.dump(1) + "\n";
}

BenchReport bench_report_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError("<report>", std::string("invalid JSON: ") + e.what());
  }
  BenchReport report;
  report.config = synth_config_from_json(doc.at("config").dump());
  report.used_snapshots = doc.at("used_snapshots").get<bool>();
  report.jobs = doc.at("jobs").get<int>();
  for (const auto& entry : doc.at("tasks")) {
    TaskOutcome t;
    t.id = entry.at("id").get<std::string>();
    t.category = *category_from_name(entry.at("category").get<std::string>());
    t.solved = entry.at("solved").get<bool>();
    t.program_text = entry.at("program").get<std::string>();
    t.error = entry.at("error").get<std::string>();
    t.stats = stats_from_json(entry.at("stats"));
    report.tasks.push_back(std::move(t));
  }
  for (const auto& entry : doc.at("rows")) {
    CategoryRow r;
    r.category = *category_from_name(entry.at("category").get<std::string>());
    r.attempted = entry.at("attempted").get<int>();
    r.solved = entry.at("solved").get<int>();
    r.mean_ms = entry.at("mean_ms").get<double>();
    r.median_ms = entry.at("median_ms").get<double>();
    r.mean_tested = entry.at("mean_tested").get<double>();
    r.mean_reduction = entry.at("mean_reduction").get<double>();
    report.rows.push_back(r);
  }
  return report;
}

}  // namespace iparc
