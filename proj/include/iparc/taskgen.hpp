#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "iparc/se.hpp"
#include "iparc/task.hpp"

namespace iparc {

/// Generation knobs. Inputs are sampled cell-independently with foreground
/// probability `density`; colour-bearing categories colour foreground cells
/// uniformly. A pair is rejected and resampled when its output equals the
/// input's foreground indicator, the input itself, or is constant; after
/// max_rejects rejections the sampled program counts as degenerate.
struct GenParams {
  int grid_width = 15;
  int grid_height = 15;
  double density = 0.3;
  int pairs_per_task = 4;
  int num_colors = 3;
  uint64_t seed = 0;
  bool emit_snapshots = false;
  int max_rejects = 1000;

  void validate() const;
};

/// Samples a ground-truth program from the category's grammar. Deterministic
/// in (category, lib, seed).
MorphProgram generate_program(Category category, const SELibrary& lib, uint64_t seed);

/// Generates one task: samples a program and inputs, runs the program for
/// the outputs, and attaches the program as ground truth. Snapshot images,
/// when requested, record the band state after an interior step of each
/// band's pipeline (one snapshot per pair; categories A only).
/// Throws DegenerateProgramError when non-degenerate pairs cannot be found
/// within the rejection budget.
Task generate_task(Category category, const GenParams& params, const SELibrary& lib);

/// count tasks with ids "<category>-<seed>-<index>" and per-task seeds
/// params.seed + index. Degenerate programs are resampled internally.
std::vector<Task> generate_suite(Category category, int count, const GenParams& params,
                                 const SELibrary& lib);

struct SuiteManifest {
  Category category = Category::ASimple;
  uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> tasks;  // id, filename
};

/// Generates a suite, saves each task under dir and writes dir/manifest.json.
SuiteManifest write_suite(const std::string& dir, Category category, int count,
                          const GenParams& params, const SELibrary& lib);

SuiteManifest load_manifest(const std::string& dir);

}  // namespace iparc
