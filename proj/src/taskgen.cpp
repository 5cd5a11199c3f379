#include "iparc/taskgen.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "iparc/errors.hpp"
#include "iparc/rng.hpp"
#include "iparc/synth.hpp"

namespace iparc {

using nlohmann::json;

void GenParams::validate() const {
  if (grid_width < 3 || grid_height < 3)
    throw std::invalid_argument("grid must be at least 3x3");
  if (density <= 0.0 || density >= 1.0)
    throw std::invalid_argument("density must be strictly between 0 and 1");
  if (pairs_per_task < 2) throw std::invalid_argument("pairs_per_task must be >= 2");
  if (num_colors < 2) throw std::invalid_argument("num_colors must be >= 2");
  if (max_rejects < 1) throw std::invalid_argument("max_rejects must be >= 1");
}

namespace {

// SEs whose dilation is the identity (a single FG cell at the origin) make
// degenerate ground-truth steps; the generator skips them.
std::vector<size_t> usable_se_indices(const SELibrary& lib) {
  std::vector<size_t> out;
  for (size_t i = 0; i < lib.size(); ++i) {
    const auto& offs = lib[i].fg_offsets();
    if (offs.size() == 1 && offs[0] == std::make_pair(0, 0)) continue;
    out.push_back(i);
  }
  if (out.empty()) throw std::invalid_argument("SE library has no non-identity elements");
  return out;
}

const StructuringElement& pick_se(const SELibrary& lib, const std::vector<size_t>& pool,
                                  Rng& rng) {
  return lib[pool[rng.below(pool.size())]];
}

// d dilations then e erosions; constrained erosions draw their SE from the
// dilation phase.
std::vector<Step> sample_phase_steps(const SELibrary& lib, const std::vector<size_t>& pool,
                                     Rng& rng, int d, int e, bool constrained) {
  std::vector<Step> steps;
  std::vector<std::string> dil_ids;
  for (int i = 0; i < d; ++i) {
    const auto& se = pick_se(lib, pool, rng);
    dil_ids.push_back(se.id());
    steps.push_back(Step{Step::Op::Dilation, se.id(), 1});
  }
  for (int i = 0; i < e; ++i) {
    const std::string id = constrained && !dil_ids.empty()
                               ? dil_ids[rng.below(dil_ids.size())]
                               : pick_se(lib, pool, rng).id();
    steps.push_back(Step{Step::Op::Erosion, id, 1});
  }
  return steps;
}

// [[0,0,0],[0,1,x],[1,0,y],[1,1,z]] with distinct x, y in 1..k-1 and z one of
// them (the shape of every printed selection rule).
ColorRule sample_selection_rule(Rng& rng, int num_colors) {
  const int x = 1 + rng.below_int(num_colors - 1);
  int y = 1 + rng.below_int(num_colors - 2);
  if (y >= x) ++y;
  ColorRule rule;
  rule.set(0, 0, 0);
  rule.set(0, 1, x);
  rule.set(1, 0, y);
  rule.set(1, 1, rng.chance(0.5) ? x : y);
  return rule;
}

// An injective rule (a permutation of {1,2,3} over the non-zero band
// combinations) so that every rendered image determines both bands exactly.
ColorRule sample_injective_rule(Rng& rng) {
  int colours[3] = {1, 2, 3};
  for (int i = 2; i > 0; --i) std::swap(colours[i], colours[rng.below_int(i + 1)]);
  ColorRule rule;
  rule.set(0, 0, 0);
  rule.set(1, 0, colours[0]);
  rule.set(0, 1, colours[1]);
  rule.set(1, 1, colours[2]);
  return rule;
}

// Macros are 2-3 steps long and keep the dilations-then-erosions shape.
std::vector<Step> sample_macro(const SELibrary& lib, const std::vector<size_t>& pool, Rng& rng) {
  const int d = rng.between(1, 2);
  const int e = rng.between(std::max(0, 2 - d), std::min(1, 3 - d));
  return sample_phase_steps(lib, pool, rng, d, e, false);
}

MorphProgram sample_program(Category category, const SELibrary& lib, Rng rng,
                            const std::vector<Step>* shared_macro) {
  const auto pool = usable_se_indices(lib);
  MorphProgram program;
  switch (category) {
    case Category::ASimple: {
      const int d = rng.between(1, 4);
      const int e = rng.between(std::max(0, 2 - d), std::min(3, 6 - d));
      program.pipelines.push_back(
          BandPipeline{1, sample_phase_steps(lib, pool, rng, d, e, false)});
      break;
    }
    case Category::AHard: {
      for (int band = 1; band <= 2; ++band) {
        const int d = rng.between(3, 4);
        const int e = rng.between(1, 3);
        program.pipelines.push_back(
            BandPipeline{band, sample_phase_steps(lib, pool, rng, d, e, true)});
      }
      program.color_rule = sample_injective_rule(rng);
      break;
    }
    case Category::BSequence: {
      std::vector<Step> macro = shared_macro ? *shared_macro : sample_macro(lib, pool, rng);
      const int budget = 6 - static_cast<int>(macro.size());
      const int pre = rng.between(0, std::min(2, budget));
      const int post = rng.between(std::max(0, 2 - pre - static_cast<int>(macro.size())),
                                   std::min(1, budget - pre));
      std::vector<Step> steps = sample_phase_steps(lib, pool, rng, pre, 0, false);
      steps.insert(steps.end(), macro.begin(), macro.end());
      for (int i = 0; i < post; ++i)
        steps.push_back(Step{Step::Op::Erosion, pick_se(lib, pool, rng).id(), 1});
      program.pipelines.push_back(BandPipeline{1, std::move(steps)});
      break;
    }
    case Category::BIteration: {
      const auto& se = pick_se(lib, pool, rng);
      const int k = rng.between(2, 4);
      program.pipelines.push_back(BandPipeline{
          1, {Step{Step::Op::Dilation, se.id(), k}, Step{Step::Op::Erosion, se.id(), k}}});
      break;
    }
    case Category::BSelection: {
      program.split_se = pick_se(lib, pool, rng).id();
      for (int band = 1; band <= 2; ++band) {
        const int d = rng.between(0, 1);
        const int e = rng.between(0, 1);
        auto steps = sample_phase_steps(lib, pool, rng, d, e, false);
        if (!steps.empty()) program.pipelines.push_back(BandPipeline{band, std::move(steps)});
      }
      program.color_rule = sample_selection_rule(rng, 3);
      break;
    }
    case Category::BHard: {
      program.split_se = pick_se(lib, pool, rng).id();
      const auto& se = pick_se(lib, pool, rng);
      const int k = rng.between(2, 4);
      program.pipelines.push_back(BandPipeline{
          1, {Step{Step::Op::Dilation, se.id(), k}, Step{Step::Op::Erosion, se.id(), k}}});
      const int d = rng.between(3, 4);
      const int e = rng.between(1, 3);
      program.pipelines.push_back(
          BandPipeline{2, sample_phase_steps(lib, pool, rng, d, e, true)});
      program.color_rule = sample_selection_rule(rng, 3);
      break;
    }
  }
  return fold_iterations(program).normalized();
}

int category_colors(Category category, const GenParams& params) {
  switch (category) {
    case Category::ASimple:
    case Category::BSequence:
    case Category::BIteration: return 2;
    case Category::BSelection:
    case Category::BHard: return std::max(3, params.num_colors);
    case Category::AHard: return 4;
  }
  return 2;
}

bool uses_split(Category category) {
  return category == Category::BSelection || category == Category::BHard;
}

Image sample_input(Category category, const GenParams& params, int num_colors, Rng& rng) {
  Image img(params.grid_width, params.grid_height, num_colors);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      if (rng.chance(params.density))
        img.at(r, c) = category == Category::AHard ? 1 + rng.below_int(3) : 1;
  return img;
}

// Writes the split template into the image at 1-3 random positions so that
// hit-or-miss has something to select.
void stamp_pattern(Image& img, const StructuringElement& se, Rng& rng) {
  const int stamps = rng.between(1, 3);
  for (int n = 0; n < stamps; ++n) {
    const int r0 = rng.below_int(img.height - se.rows() + 1);
    const int c0 = rng.below_int(img.width - se.cols() + 1);
    for (int r = 0; r < se.rows(); ++r)
      for (int c = 0; c < se.cols(); ++c) {
        if (se.cell(r, c) == SeCell::Fg) img.at(r0 + r, c0 + c) = 1;
        if (se.cell(r, c) == SeCell::Bg) img.at(r0 + r, c0 + c) = 0;
      }
  }
}

bool constant_image(const Image& img) {
  const bool all_bg = std::all_of(img.cells.begin(), img.cells.end(), [](int v) { return v == 0; });
  const bool all_fg = std::all_of(img.cells.begin(), img.cells.end(), [](int v) { return v >= 1; });
  return all_bg || all_fg;
}

// Interior cut points of each band pipeline (step index in 1..len-1), chosen
// once per task so one program explains every pair's snapshot.
struct SnapshotPlan {
  int cut1 = 0, cut2 = 0;
};

SnapshotPlan plan_snapshots(const MorphProgram& program, Rng& rng) {
  SnapshotPlan plan;
  const MorphProgram flat = unfold_iterations(program);
  auto cut_for = [&](int band) {
    const BandPipeline* p = flat.pipeline(band);
    const int len = p ? static_cast<int>(p->steps.size()) : 0;
    if (len < 2) return len;  // no interior: snapshot after the whole pipeline
    return rng.between(1, len - 1);
  };
  plan.cut1 = cut_for(1);
  plan.cut2 = cut_for(2);
  return plan;
}

Image render_snapshot(Category category, const MorphProgram& program, const Image& input,
                      const SnapshotPlan& plan, const SELibrary& lib, int num_colors) {
  const MorphProgram flat = unfold_iterations(program);
  auto partial = [&](int band, int cut, BinaryBand start) {
    const BandPipeline* p = flat.pipeline(band);
    std::vector<Step> steps;
    if (p) steps.assign(p->steps.begin(), p->steps.begin() + cut);
    return run_pipeline(steps, std::move(start), lib);
  };
  if (category == Category::AHard) {
    const BinaryBand b1 = partial(1, plan.cut1, color_class_band(input, 1));
    const BinaryBand b2 = partial(2, plan.cut2, color_class_band(input, 2));
    Image snap(input.width, input.height, num_colors);
    for (int r = 0; r < snap.height; ++r)
      for (int c = 0; c < snap.width; ++c)
        snap.at(r, c) = (b1.at(r, c) ? 1 : 0) + (b2.at(r, c) ? 2 : 0);
    return snap;
  }
  return indicator_image(partial(1, plan.cut1, foreground_band(input)), num_colors);
}

Task generate_task_attempt(Category category, const GenParams& params, const SELibrary& lib,
                           uint64_t attempt, const std::vector<Step>* shared_macro) {
  if (params.emit_snapshots && uses_split(category))
    throw std::invalid_argument("snapshots are only generated for categories A");

  Rng root(params.seed);
  Rng program_rng = root.fork(1 + attempt * 3);
  Rng pair_rng = root.fork(2 + attempt * 3);
  Rng cut_rng = root.fork(3 + attempt * 3);

  Task task;
  task.category = category;
  task.num_colors = category_colors(category, params);
  task.id = category_name(category) + "-" + std::to_string(params.seed) + "-0";
  task.ground_truth = sample_program(category, lib, program_rng, shared_macro);

  const MorphProgram& gt = *task.ground_truth;
  SnapshotPlan plan;
  if (params.emit_snapshots) plan = plan_snapshots(gt, cut_rng);

  int rejects = 0;
  while (static_cast<int>(task.pairs.size()) < params.pairs_per_task) {
    Image input = sample_input(category, params, task.num_colors, pair_rng);
    if (uses_split(category)) stamp_pattern(input, lib.at(*gt.split_se), pair_rng);

    bool ok = true;
    if (uses_split(category) && hit_or_miss(foreground_band(input), lib.at(*gt.split_se)).none())
      ok = false;
    Image output;
    if (ok) {
      output = run_program(gt, input, lib);
      if (constant_image(output) || output == input ||
          output == indicator_image(foreground_band(input), task.num_colors))
        ok = false;
    }
    if (!ok) {
      if (++rejects > params.max_rejects)
        throw DegenerateProgramError("program for " + task.id + " rejected " +
                                     std::to_string(rejects) + " inputs");
      continue;
    }
    TaskPair pair;
    pair.input = std::move(input);
    pair.output = std::move(output);
    if (params.emit_snapshots)
      pair.snapshots.push_back(
          render_snapshot(category, gt, pair.input, plan, lib, task.num_colors));
    task.pairs.push_back(std::move(pair));
  }
  return task;
}

}  // namespace

MorphProgram generate_program(Category category, const SELibrary& lib, uint64_t seed) {
  return sample_program(category, lib, Rng(seed).fork(1), nullptr);
}

Task generate_task(Category category, const GenParams& params, const SELibrary& lib) {
  params.validate();
  return generate_task_attempt(category, params, lib, 0, nullptr);
}

std::vector<Task> generate_suite(Category category, int count, const GenParams& params,
                                 const SELibrary& lib) {
  params.validate();
  if (count < 1) throw std::invalid_argument("suite count must be >= 1");

  std::vector<Step> shared_macro;
  if (category == Category::BSequence) {
    Rng macro_rng = Rng(params.seed).fork(999);
    shared_macro = sample_macro(lib, usable_se_indices(lib), macro_rng);
  }

  std::vector<Task> tasks;
  constexpr uint64_t kMaxAttempts = 100;
  for (int i = 0; i < count; ++i) {
    GenParams task_params = params;
    task_params.seed = params.seed + static_cast<uint64_t>(i);
    Task task;
    bool generated = false;
    for (uint64_t attempt = 0; attempt < kMaxAttempts && !generated; ++attempt) {
      try {
        task = generate_task_attempt(category, task_params, lib, attempt,
                                     category == Category::BSequence ? &shared_macro : nullptr);
        generated = true;
      } catch (const DegenerateProgramError&) {
        continue;
      }
    }
    if (!generated)
      throw DegenerateProgramError("could not generate a non-degenerate task for index " +
                                   std::to_string(i));
    task.id = category_name(category) + "-" + std::to_string(params.seed) + "-" +
              std::to_string(i);
    tasks.push_back(std::move(task));
  }
  return tasks;
}

SuiteManifest write_suite(const std::string& dir, Category category, int count,
                          const GenParams& params, const SELibrary& lib) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create suite directory '" + dir + "'");

  const auto tasks = generate_suite(category, count, params, lib);
  SuiteManifest manifest;
  manifest.category = category;
  manifest.seed = params.seed;
  for (const auto& task : tasks) {
    const std::string filename = task.id + ".json";
    save_task(task, (fs::path(dir) / filename).string());
    manifest.tasks.emplace_back(task.id, filename);
  }

  json doc;
  doc["category"] = category_name(category);
  doc["seed"] = manifest.seed;
  doc["count"] = count;
  json list = json::array();
  for (const auto& [id, file] : manifest.tasks) list.push_back({{"id", id}, {"file", file}});
  doc["tasks"] = list;
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write manifest in '" + dir + "'");
  out << doc.dump(1) << "\n";
  return manifest;
}

SuiteManifest load_manifest(const std::string& dir) {
  namespace fs = std::filesystem;
  const std::string path = (fs::path(dir) / "manifest.json").string();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw SchemaError(path, std::string("invalid JSON: ") + e.what());
  }
  SuiteManifest manifest;
  const auto category = category_from_name(doc.value("category", ""));
  if (!category) throw SchemaError(path, "missing or unknown category");
  manifest.category = *category;
  manifest.seed = doc.value("seed", uint64_t{0});
  if (!doc.contains("tasks") || !doc["tasks"].is_array())
    throw SchemaError(path, "missing tasks array");
  for (const auto& entry : doc["tasks"])
    manifest.tasks.emplace_back(entry.at("id").get<std::string>(),
                                entry.at("file").get<std::string>());
  return manifest;
}

}  // namespace iparc
