#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iparc/image.hpp"
#include "iparc/morphology.hpp"
#include "iparc/se.hpp"

namespace iparc {

/// One pipeline step in normal form: an operator, its SE, and a repeat
/// count. count == 1 is a plain step; count >= 2 is an iteration node.
/// Keeping the count on the step (instead of a nested Iterate wrapper)
/// enforces the no-nested-iterations normal form by construction.
struct Step {
  enum class Op { Dilation, Erosion, HitOrMiss };

  Op op = Op::Dilation;
  std::string se_id;
  int count = 1;

  bool operator==(const Step&) const = default;
};

std::string op_name(Step::Op op);

/// Steps applied in order to one band.
struct BandPipeline {
  int band_id = 1;
  std::vector<Step> steps;

  bool operator==(const BandPipeline&) const = default;
};

/// A structured morphological program: an optional hit-or-miss split
/// prologue, per-band step pipelines, and an optional colour rule that
/// combines bands 1 and 2 into the output image.
///
/// Interpretation of the three shapes:
///  - split present (rule required): the input's foreground is split by
///    hit-or-miss; band 2 is the matched positions, band 1 the remaining
///    foreground. Each band runs its pipeline and the rule combines them.
///  - no split, rule present: bands are read from the input colours with the
///    two-bit code band1 = {1, 3}, band2 = {2, 3} (colour 3 means both). For
///    images without colour 3 this is plain per-colour band extraction.
///  - no split, no rule: the foreground band runs the band-1 pipeline and the
///    result is returned as a 0/1 indicator image.
///
/// Empty pipelines are identity; normalized() drops them.
struct MorphProgram {
  std::optional<std::string> split_se;
  std::vector<BandPipeline> pipelines;
  std::optional<ColorRule> color_rule;

  bool operator==(const MorphProgram&) const = default;

  bool empty() const { return !split_se && !color_rule && pipelines.empty(); }

  const BandPipeline* pipeline(int band_id) const;
  std::vector<Step>& steps_for(int band_id);

  /// Sorts pipelines by band id and drops empty ones.
  MorphProgram normalized() const;

  /// Checks structural invariants; returns a description of the first
  /// violation or nullopt when valid.
  std::optional<std::string> check() const;
};

/// Applies a step list to a band.
BinaryBand run_pipeline(const std::vector<Step>& steps, BinaryBand band, const SELibrary& lib);

/// Runs a program on an image. Throws UnresolvedSeError for unknown SE ids
/// and IncompleteRuleError when the colour rule misses an occurring
/// combination. Output dimensions equal input dimensions.
Image run_program(const MorphProgram& program, const Image& img, const SELibrary& lib);

/// Reads the two rule bands from an image: band 1 = colours {1, 3},
/// band 2 = colours {2, 3}.
BinaryBand color_class_band(const Image& img, int band_id);

/// Replaces maximal runs of identical consecutive steps with one counted
/// step. Semantics are preserved.
MorphProgram fold_iterations(const MorphProgram& program);

/// Expands every counted step into count copies with count 1.
MorphProgram unfold_iterations(const MorphProgram& program);

/// Number of primitive operator applications after unfolding, plus 1 when a
/// split is present.
int program_size(const MorphProgram& program);

}  // namespace iparc
