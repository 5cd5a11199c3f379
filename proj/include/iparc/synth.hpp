#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "iparc/se.hpp"
#include "iparc/task.hpp"

namespace iparc {

struct IntRange {
  int lo = 0;
  int hi = 0;

  bool contains(int v) const { return v >= lo && v <= hi; }
  bool valid() const { return lo <= hi && lo >= 0; }
  bool operator==(const IntRange&) const = default;
};

/// Search knobs. Defaults follow the band-2 pattern (3-4 dilations, then 1-3
/// erosions whose SEs come from the dilation phase) and 100-candidate random
/// sampling.
struct SynthConfig {
  int max_seq_len = 6;
  IntRange dilation_counts{3, 4};
  IntRange erosion_counts{1, 3};
  bool erosion_ses_from_dilations = true;
  int sample_count = 100;
  uint64_t seed = 0;
  std::chrono::milliseconds time_budget{120000};
  bool pruning_enabled = true;
  bool randomization_enabled = false;
  int max_iterate = 4;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Reads a JSON object whose keys mirror the SynthConfig field names; absent
/// keys keep their defaults (from `base`). Ranges are [lo, hi] arrays;
/// time_budget is either a number of seconds or a string like "120s".
SynthConfig synth_config_from_json(const std::string& text, SynthConfig base = {});
std::string synth_config_to_json(const SynthConfig& cfg);

/// Parses "500ms", "45s", "2m", "1h" or a plain number of seconds.
std::chrono::milliseconds parse_duration(const std::string& text);

/// Search instrumentation. candidates_enumerated counts every candidate the
/// search accounted for, including whole subtrees eliminated by pruning;
/// candidates_pruned those eliminated without a full evaluation;
/// candidates_tested those actually compared against the target.
struct SearchStats {
  uint64_t candidates_enumerated = 0;
  uint64_t candidates_pruned = 0;
  uint64_t candidates_tested = 0;
  std::chrono::milliseconds elapsed{0};
  bool solved = false;

  /// enumerated / (enumerated - pruned); 1 when nothing was enumerated.
  double reduction_factor() const;
  void merge(const SearchStats& other);
};

/// A flat operator sequence assigned to one band (steps have count 1).
struct CandidateSequence {
  int band_id = 1;
  std::vector<Step> steps;

  bool operator==(const CandidateSequence&) const = default;
};

/// Streamed candidate enumeration interface.
class CandidateStream {
 public:
  virtual ~CandidateStream() = default;
  virtual std::optional<CandidateSequence> next() = 0;
};

/// All operator sequences of length 1..max_len over ops x SE ids,
/// shortest-first, lexicographic by (op order, library order) within a
/// length. Duplicate-free by construction.
class SequenceStream final : public CandidateStream {
 public:
  SequenceStream(std::vector<Step::Op> ops, std::vector<std::string> se_ids, int max_len);
  std::optional<CandidateSequence> next() override;
  uint64_t total_count() const;

 private:
  std::vector<Step::Op> ops_;
  std::vector<std::string> se_ids_;
  int max_len_;
  int len_ = 1;
  bool done_ = false;
  std::vector<int> digits_;
};

/// The band-2 pattern: d dilations (SEs from the library, repetition allowed)
/// followed by e erosions. When constrained, each erosion SE is drawn from
/// the positions of that candidate's dilation phase (duplicates appear once
/// per drawing, matching the nested-product count d^e). Order: d ascending,
/// dilation tuple lexicographic, e ascending, erosion choice lexicographic.
class Band2Stream final : public CandidateStream {
 public:
  Band2Stream(std::vector<std::string> se_ids, IntRange dilation_counts, IntRange erosion_counts,
              bool erosion_ses_from_dilations);
  static Band2Stream from_config(const SELibrary& lib, const SynthConfig& cfg);

  std::optional<CandidateSequence> next() override;
  uint64_t total_count() const;
  /// Number of candidates in one (d, e) cell.
  uint64_t cell_count(int d, int e) const;

 private:
  bool advance();
  std::optional<int> first_erosion_count(int d, int from) const;

  std::vector<std::string> se_ids_;
  IntRange dil_, ero_;
  bool constrained_;
  int d_ = 0, e_ = 0;
  std::vector<int> dil_digits_, ero_digits_;
  bool done_ = false;
};

/// Uniform reservoir sample of up to n candidates from a stream,
/// deterministic for a fixed seed. Returns everything when the stream is
/// shorter than n.
std::vector<CandidateSequence> sample_candidates(CandidateStream& stream, int n, uint64_t seed);

/// Remembers simulation states so repeated prefixes can be dropped (rule R3).
class PruneMemo {
 public:
  /// Returns true when the key was already present (a duplicate).
  bool check_and_insert(const std::string& key);
  size_t size() const { return seen_.size(); }

 private:
  std::unordered_set<std::string> seen_;
};

enum class PruneReason { None, ErosionCoverage, BoundaryCoverage, Duplicate };

struct PruneDecision {
  bool drop = false;
  PruneReason reason = PruneReason::None;
};

/// Prefix pruning for dilations-then-erosions candidates on single-band
/// tasks (targets are the output foregrounds). Sound rules only:
///  R1 - once the erosion phase has begun, a band that no longer covers the
///       target foreground on some pair can never reach it (erosion is
///       anti-extensive for FG-origin SEs);
///  R2 - with at_phase_boundary set, a dilated band that does not cover the
///       target foreground cannot be fixed by erosions;
///  R3 - a state equal to one already memoised (same phase) is a duplicate.
/// Requires every SE in lib to have a foreground origin.
PruneDecision prune(const CandidateSequence& prefix, const std::vector<TaskPair>& pairs,
                    const SELibrary& lib, bool at_phase_boundary = false,
                    PruneMemo* memo = nullptr);

/// First conflict witness when one (b1, b2) combination maps to two different
/// output colours (pair-major, then row-major order).
struct RuleConflict {
  size_t pair_index = 0;
  int row = 0, col = 0;
  int b1 = 0, b2 = 0;
  int existing_color = 0, new_color = 0;
};

/// The unique lookup table mapping each observed (b1, b2) to the target
/// colour, with unobserved combinations defaulted to colour 0.
std::variant<ColorRule, RuleConflict> infer_color_rule(const std::vector<BinaryBand>& band1s,
                                                       const std::vector<BinaryBand>& band2s,
                                                       const std::vector<Image>& outputs);

/// True iff the program reproduces every pair cell-exactly. Interpreter
/// errors (unresolved SE, incomplete rule) count as false.
bool verify(const MorphProgram& program, const Task& task, const SELibrary& lib);

/// A verified sub-pipeline shared across solved tasks of a category.
struct Macro {
  std::vector<Step> steps;  // unfolded, counts all 1
  int hits = 0;

  bool operator==(const Macro&) const = default;
};

/// Frozen per-category store of mined macros; insertion order is stable and
/// entries are never mutated after insertion.
class MacroLibrary {
 public:
  void add(Category category, Macro macro);
  const std::vector<Macro>& for_category(Category category) const;
  size_t size(Category category) const { return for_category(category).size(); }
  size_t total_size() const;

 private:
  std::map<Category, std::vector<Macro>> macros_;
};

/// All maximal sub-pipelines of length >= 2 occurring in at least 2 distinct
/// solved programs of the same category, ordered by (frequency desc, length
/// desc). "Maximal" keeps a sub-pipeline only when no longer one has the
/// same supporting program set.
MacroLibrary mine_macros(const std::vector<std::pair<Task, MorphProgram>>& solved);

/// Search outcome: NoSolution is a first-class result (program empty), not
/// an error. Stats are always populated.
struct SolveResult {
  std::optional<MorphProgram> program;
  SearchStats stats;

  bool solved() const { return program.has_value(); }
};

/// Finds a program exactly consistent with every pair, dispatching a
/// per-category engine. On success the returned program verifies against all
/// pairs and is the first success in the deterministic candidate order.
SolveResult solve(const Task& task, const SynthConfig& cfg, const SELibrary& lib,
                  const MacroLibrary& macros = {});

/// Splits the task at its snapshot checkpoints into s+1 independent
/// sub-searches (each with budget time_budget/(s+1)) and concatenates the
/// sub-programs. Requires at least one snapshot per pair.
SolveResult solve_with_snapshots(const Task& task, const SynthConfig& cfg, const SELibrary& lib,
                                 const MacroLibrary& macros = {});

}  // namespace iparc
