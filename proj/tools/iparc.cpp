#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "iparc/bench.hpp"
#include "iparc/errors.hpp"
#include "iparc/program_text.hpp"
#include "iparc/synth.hpp"
#include "iparc/task.hpp"
#include "iparc/taskgen.hpp"

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitError = 1;
constexpr int kExitNoSolution = 2;

iparc::SELibrary load_library(const std::string& se_config) {
  return se_config.empty() ? iparc::default_se_library() : iparc::load_se_library(se_config);
}

iparc::SynthConfig load_config(const std::string& config_path) {
  if (config_path.empty()) return {};
  std::ifstream in(config_path);
  if (!in) throw iparc::IoError("cannot open config '" + config_path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return iparc::synth_config_from_json(buf.str());
}

void print_stats(const iparc::SearchStats& stats, uint64_t seed) {
  std::cout << "stats: enumerated=" << stats.candidates_enumerated
            << " pruned=" << stats.candidates_pruned << " tested=" << stats.candidates_tested
            << " reduction=" << stats.reduction_factor() << " elapsed_ms=" << stats.elapsed.count()
            << " seed=" << seed << "\n";
}


int cmd_solve(const std::string& task_path, const std::string& config_path,
              const std::string& se_config, const std::string& budget,
              const std::optional<uint64_t>& seed, const std::string& out_path,
              const std::string& snapshots_flag) {
  iparc::SynthConfig cfg = load_config(config_path);
  if (!budget.empty()) cfg.time_budget = iparc::parse_duration(budget);
  if (seed) cfg.seed = *seed;
  const iparc::SELibrary lib = load_library(se_config);
  const iparc::Task task = iparc::load_task(task_path);

  const bool has_snapshots = !task.pairs.empty() && !task.pairs[0].snapshots.empty();
  const bool use_snapshots = snapshots_flag == "on" || (snapshots_flag.empty() && has_snapshots);
  iparc::SolveResult result = use_snapshots && has_snapshots
                                  ? iparc::solve_with_snapshots(task, cfg, lib)
                                  : iparc::solve(task, cfg, lib);
  print_stats(result.stats, cfg.seed);
  if (!result.program) {
    std::cout << "no solution within budget\n";
    return kExitNoSolution;
  }
  const std::string text = iparc::print_program(*result.program);
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw iparc::IoError("cannot write solution file '" + out_path + "'");
    out << text;
  }
  return kExitSolved;
}

int cmd_generate(const std::string& category_name, int count, const iparc::GenParams& params,
                 const std::string& out_dir, const std::string& se_config) {
  const auto category = iparc::category_from_name(category_name);
  if (!category) {
    std::cerr << "unknown category '" << category_name << "'\n";
    return kExitError;
  }
  const iparc::SELibrary lib = load_library(se_config);
  const auto manifest = iparc::write_suite(out_dir, *category, count, params, lib);
  std::cout << "wrote " << manifest.tasks.size() << " tasks and manifest.json to " << out_dir
            << "\n";
  return kExitSolved;
}

int cmd_verify(const std::string& task_path, const std::string& solution_path,
               const std::string& se_config) {
  const iparc::Task task = iparc::load_task(task_path);
  std::ifstream in(solution_path);
  if (!in) throw iparc::IoError("cannot open solution '" + solution_path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const iparc::MorphProgram program = iparc::parse_program(buf.str());
  const iparc::SELibrary lib = load_library(se_config);

  for (size_t i = 0; i < task.pairs.size(); ++i) {
    const auto& pair = task.pairs[i];
    const iparc::Image got = iparc::run_program(program, pair.input, lib);
    if (got == pair.output) continue;
    int diff = 0, first_r = -1, first_c = -1;
    for (int r = 0; r < pair.output.height; ++r)
      for (int c = 0; c < pair.output.width; ++c)
        if (got.at(r, c) != pair.output.at(r, c)) {
          ++diff;
          if (first_r < 0) {
            first_r = r;
            first_c = c;
          }
        }
    std::cout << "FAIL pair " << i << ": " << diff << " differing cells, first at (" << first_r
              << ", " << first_c << ") got " << got.at(first_r, first_c) << " want "
              << pair.output.at(first_r, first_c) << "\n";
    return kExitNoSolution;
  }
  std::cout << "OK: solution reproduces all " << task.pairs.size() << " pairs\n";
  return kExitSolved;
}

int cmd_bench(const std::string& suite_dir, const std::string& config_path,
              const std::string& se_config, const std::string& budget,
              const std::optional<uint64_t>& seed, const std::string& pruning,
              const std::string& randomize, const std::string& snapshots, int jobs,
              const std::string& report_path) {
  if (!se_config.empty())
    std::cerr << "note: bench always uses the default SE library\n";
  iparc::SynthConfig cfg = load_config(config_path);
  if (!budget.empty()) cfg.time_budget = iparc::parse_duration(budget);
  if (seed) cfg.seed = *seed;
  if (!pruning.empty()) cfg.pruning_enabled = pruning == "on";
  if (!randomize.empty()) cfg.randomization_enabled = randomize == "on";
  const bool use_snapshots = snapshots == "on";

  const iparc::BenchReport report = iparc::run_bench(suite_dir, cfg, use_snapshots, jobs);
  std::cout << iparc::bench_report_table(report);
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw iparc::IoError("cannot write report '" + report_path + "'");
    out << iparc::bench_report_to_json(report);
    std::cout << "report written to " << report_path << "\n";
  }
  return kExitSolved;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morphological program synthesis for IPARC-style grid tasks"};
  app.require_subcommand(1);

  std::string task_path, solution_path, config_path, se_config, budget, out_path, out_dir;
  std::string category, report_path;
  std::string pruning, randomize, snapshots;
  std::optional<uint64_t> seed;
  int count = 20, jobs = 1;
  iparc::GenParams params;

  auto add_se_option = [&](CLI::App* cmd) {
    cmd->add_option("--se-library", se_config, "JSON file overriding the default SE library")
        ->envname("IPARC_SE_LIBRARY");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve a task file");
  solve->add_option("task", task_path, "task JSON file")->required();
  solve->add_option("--config", config_path, "synthesis config JSON")->envname("IPARC_CONFIG");
  solve->add_option("--seed", seed, "search seed")->envname("IPARC_SEED");
  solve->add_option("--budget", budget, "time budget per task, e.g. 45s or 2m")
      ->envname("IPARC_BUDGET");
  solve->add_option("--out", out_path, "write the solution program here");
  solve->add_option("--snapshots", snapshots, "on|off: use snapshot splitting (default: on when present)")
      ->check(CLI::IsMember({"on", "off"}));
  add_se_option(solve);

  CLI::App* generate = app.add_subcommand("generate", "generate a task suite");
  generate->add_option("category", category, "A-simple|A-hard|B-sequence|B-selection|B-iteration|B-hard")
      ->required();
  generate->add_option("--count", count, "number of tasks")->check(CLI::PositiveNumber);
  generate->add_option("--seed", params.seed, "suite seed")->envname("IPARC_SEED");
  generate->add_option("--grid", [&params](const std::vector<std::string>& vals) {
    const std::string& v = vals.back();
    const size_t x = v.find('x');
    if (x == std::string::npos) return false;
    params.grid_width = std::stoi(v.substr(0, x));
    params.grid_height = std::stoi(v.substr(x + 1));
    return true;
  },
  "grid size as WxH (default 15x15)");
  generate->add_option("--density", params.density, "foreground probability (default 0.3)");
  generate->add_option("--pairs", params.pairs_per_task, "pairs per task (default 4)");
  generate->add_flag("--snapshots", params.emit_snapshots, "emit one intermediate checkpoint per pair");
  generate->add_option("--out", out_dir, "output directory")->required();
  add_se_option(generate);

  CLI::App* verify = app.add_subcommand("verify", "check a solution file against a task");
  verify->add_option("task", task_path, "task JSON file")->required();
  verify->add_option("solution", solution_path, "program text file")->required();
  add_se_option(verify);

  CLI::App* bench = app.add_subcommand("bench", "run solve over a generated suite");
  bench->add_option("suite", out_dir, "suite directory with manifest.json")->required();
  bench->add_option("--config", config_path, "synthesis config JSON")->envname("IPARC_CONFIG");
  bench->add_option("--seed", seed, "search seed")->envname("IPARC_SEED");
  bench->add_option("--budget", budget, "time budget per task")->envname("IPARC_BUDGET");
  bench->add_option("--pruning", pruning, "on|off")->check(CLI::IsMember({"on", "off"}));
  bench->add_option("--randomize", randomize, "on|off")->check(CLI::IsMember({"on", "off"}));
  bench->add_option("--snapshots", snapshots, "on|off: use snapshot splitting")
      ->check(CLI::IsMember({"on", "off"}));
  bench->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber)
      ->envname("IPARC_JOBS");
  bench->add_option("--report", report_path, "write the machine-readable report here");
  add_se_option(bench);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(solve))
      return cmd_solve(task_path, config_path, se_config, budget, seed, out_path, snapshots);
    if (app.got_subcommand(generate))
      return cmd_generate(category, count, params, out_dir, se_config);
    if (app.got_subcommand(verify)) return cmd_verify(task_path, solution_path, se_config);
    if (app.got_subcommand(bench))
      return cmd_bench(out_dir, config_path, se_config, budget, seed, pruning, randomize,
                       snapshots, jobs, report_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
