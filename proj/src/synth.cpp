#include <algorithm>
#include <array>
#include <chrono>
#include <cstdlib>
#include <map>
#include <set>
#include <unordered_set>

#include "iparc/errors.hpp"
#include "iparc/rng.hpp"
#include "iparc/synth.hpp"

namespace iparc {
namespace {

using Clock = std::chrono::steady_clock;

uint64_t sat_add(uint64_t a, uint64_t b) { return a > UINT64_MAX - b ? UINT64_MAX : a + b; }
uint64_t sat_mul(uint64_t a, uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > UINT64_MAX / b ? UINT64_MAX : a * b;
}
uint64_t sat_pow(uint64_t base, int exp) {
  uint64_t r = 1;
  while (exp-- > 0) r = sat_mul(r, base);
  return r;
}
// 1 + b + b^2 + ... + b^n
uint64_t geometric_total(uint64_t base, int n) {
  uint64_t r = 0, p = 1;
  for (int j = 0; j <= n; ++j) {
    r = sat_add(r, p);
    p = sat_mul(p, base);
  }
  return r;
}

constexpr size_t kMemoCap = 2'000'000;
constexpr size_t kNodeCap = 400'000;
constexpr size_t kCollectCap = 1'000'000;

// Per-pair partial targets for one band: must1 pixels have to end foreground,
// must0 pixels background, anything else is free.
struct TargetSpec {
  std::vector<BinaryBand> must1, must0;

  bool covered_by(const std::vector<BinaryBand>& states) const {
    for (size_t i = 0; i < states.size(); ++i)
      if (!states[i].covers(must1[i])) return false;
    return true;
  }
  bool matches(const std::vector<BinaryBand>& states) const {
    for (size_t i = 0; i < states.size(); ++i) {
      if (!states[i].covers(must1[i])) return false;
      if (states[i].intersects(must0[i])) return false;
    }
    return true;
  }
  std::string cache_key(const std::string& scope) const {
    std::string key = scope;
    key += '|';
    for (const auto& band : must1) band.append_key(key);
    key += '|';
    for (const auto& band : must0) band.append_key(key);
    return key;
  }

  static TargetSpec exact(std::vector<BinaryBand> goals) {
    TargetSpec t;
    t.must0.reserve(goals.size());
    for (const auto& g : goals) t.must0.push_back(g.complement());
    t.must1 = std::move(goals);
    return t;
  }
};

std::string pack_states(char tag, const std::vector<BinaryBand>& states) {
  std::string key(1, tag);
  for (const auto& s : states) s.append_key(key);
  return key;
}

struct SearchOutcome {
  bool found = false;
  std::vector<Step> steps;              // flat, counts all 1
  std::vector<BinaryBand> finals;       // transformed band per pair
};

struct PhaseGrammar {
  IntRange dil;
  IntRange ero;
  bool constrained = true;  // erosion SEs drawn from the dilation phase
};

struct Ctx {
  const SynthConfig& cfg;
  const SELibrary& lib;
  bool pruning;
  SearchStats stats;
  Clock::time_point deadline;
  bool timed_out = false;
  uint32_t tick = 0;

  Ctx(const SynthConfig& cfg_, const SELibrary& lib_)
      : cfg(cfg_),
        lib(lib_),
        pruning(cfg_.pruning_enabled && lib_.all_origins_fg()),
        deadline(Clock::now() + cfg_.time_budget) {}

  bool expired() {
    if (timed_out) return true;
    if ((++tick & 0x1FF) != 0) return false;
    if (Clock::now() >= deadline) timed_out = true;
    return timed_out;
  }
};

std::vector<BinaryBand> apply_to_all(const std::vector<BinaryBand>& states, Step::Op op,
                                     const StructuringElement& se) {
  std::vector<BinaryBand> out;
  out.reserve(states.size());
  for (const auto& s : states) {
    switch (op) {
      case Step::Op::Dilation: out.push_back(dilate(s, se)); break;
      case Step::Op::Erosion: out.push_back(erode(s, se)); break;
      case Step::Op::HitOrMiss: out.push_back(hit_or_miss(s, se)); break;
    }
  }
  return out;
}

std::vector<BinaryBand> run_steps(const std::vector<BinaryBand>& starts,
                                  const std::vector<Step>& steps, const SELibrary& lib) {
  std::vector<BinaryBand> states = starts;
  for (const auto& step : steps) {
    const StructuringElement& se = lib.at(step.se_id);
    for (int i = 0; i < step.count; ++i) states = apply_to_all(states, step.op, se);
  }
  return states;
}

bool macro_resolvable(const Macro& macro, const SELibrary& lib) {
  for (const auto& s : macro.steps)
    if (!lib.find(s.se_id)) return false;
  return true;
}

// Tests the category's macros (library order) and then the identity pipeline.
std::optional<SearchOutcome> priority_pass(Ctx& ctx, const std::vector<BinaryBand>& starts,
                                           const TargetSpec& targets,
                                           const std::vector<Macro>& macros) {
  auto test = [&](const std::vector<Step>& steps) -> std::optional<SearchOutcome> {
    std::vector<BinaryBand> states = run_steps(starts, steps, ctx.lib);
    ctx.stats.candidates_enumerated++;
    ctx.stats.candidates_tested++;
    if (targets.matches(states)) return SearchOutcome{true, steps, std::move(states)};
    return std::nullopt;
  };
  for (const auto& macro : macros) {
    if (ctx.expired()) return SearchOutcome{};
    if (!macro_resolvable(macro, ctx.lib)) continue;
    if (auto hit = test(macro.steps)) return hit;
  }
  if (auto hit = test({})) return hit;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// General sequence search over {Dilation, Erosion} x library, shortest-first.
// With pruning: breadth-first with duplicate-state elimination (rule R3).
// Without: iterative-deepening enumeration of every sequence.

class SequenceSearch {
 public:
  SequenceSearch(Ctx& ctx, const std::vector<BinaryBand>& starts, const TargetSpec& targets,
                 int max_len)
      : ctx_(ctx), starts_(starts), targets_(targets), max_len_(max_len) {}

  SearchOutcome run() { return ctx_.pruning ? run_bfs() : run_iddfs(); }

 private:
  uint64_t branching() const { return 2 * ctx_.lib.size(); }

  SearchOutcome run_bfs() {
    struct Node {
      std::vector<BinaryBand> state;
      int parent;
      Step step;
    };
    std::vector<Node> nodes;
    nodes.push_back({starts_, -1, Step{}});
    std::unordered_set<std::string> seen;
    seen.insert(pack_states('S', starts_));

    size_t layer_begin = 0, layer_end = 1;
    for (int depth = 1; depth <= max_len_ && layer_begin < layer_end; ++depth) {
      for (size_t idx = layer_begin; idx < layer_end; ++idx) {
        if (ctx_.expired()) return {};
        for (Step::Op op : {Step::Op::Dilation, Step::Op::Erosion}) {
          for (size_t s = 0; s < ctx_.lib.size(); ++s) {
            auto child = apply_to_all(nodes[idx].state, op, ctx_.lib[s]);
            const std::string key = pack_states('S', child);
            if (seen.count(key)) {
              const uint64_t killed = geometric_total(branching(), max_len_ - depth);
              ctx_.stats.candidates_pruned = sat_add(ctx_.stats.candidates_pruned, killed);
              ctx_.stats.candidates_enumerated =
                  sat_add(ctx_.stats.candidates_enumerated, killed);
              continue;
            }
            ctx_.stats.candidates_enumerated++;
            ctx_.stats.candidates_tested++;
            const Step step{op, ctx_.lib[s].id(), 1};
            if (targets_.matches(child)) {
              SearchOutcome out{true, {}, std::move(child)};
              out.steps.push_back(step);
              for (int n = static_cast<int>(idx); n > 0; n = nodes[n].parent)
                out.steps.push_back(nodes[n].step);
              std::reverse(out.steps.begin(), out.steps.end());
              return out;
            }
            if (seen.size() < kMemoCap) seen.insert(key);
            if (nodes.size() < kNodeCap && depth < max_len_)
              nodes.push_back({std::move(child), static_cast<int>(idx), step});
          }
        }
      }
      layer_begin = layer_end;
      layer_end = nodes.size();
    }
    return {};
  }

  SearchOutcome run_iddfs() {
    std::vector<Step> path;
    for (int target_len = 1; target_len <= max_len_; ++target_len) {
      SearchOutcome out = dfs(starts_, 0, target_len, path);
      if (out.found || ctx_.timed_out) return out;
    }
    return {};
  }

  SearchOutcome dfs(const std::vector<BinaryBand>& state, int depth, int target_len,
                    std::vector<Step>& path) {
    if (ctx_.expired()) return {};
    for (Step::Op op : {Step::Op::Dilation, Step::Op::Erosion}) {
      for (size_t s = 0; s < ctx_.lib.size(); ++s) {
        auto child = apply_to_all(state, op, ctx_.lib[s]);
        path.push_back(Step{op, ctx_.lib[s].id(), 1});
        if (depth + 1 == target_len) {
          ctx_.stats.candidates_enumerated++;
          ctx_.stats.candidates_tested++;
          if (targets_.matches(child)) {
            SearchOutcome out{true, path, std::move(child)};
            return out;
          }
        } else {
          SearchOutcome out = dfs(child, depth + 1, target_len, path);
          if (out.found || ctx_.timed_out) return out;
        }
        path.pop_back();
      }
    }
    return {};
  }

  Ctx& ctx_;
  const std::vector<BinaryBand>& starts_;
  const TargetSpec& targets_;
  int max_len_;
};

// ---------------------------------------------------------------------------
// Phased search over the band-2 grammar: d dilations then e erosions.
// Pruning uses R2 (coverage at the phase boundary), R1 (coverage after each
// erosion) and R3 (duplicate states; dilation states are compared together
// with their SE multiset because it determines the erosion pool).

class PhasedSearch {
 public:
  PhasedSearch(Ctx& ctx, const std::vector<BinaryBand>& starts, const TargetSpec& targets,
               const PhaseGrammar& grammar)
      : ctx_(ctx), starts_(starts), targets_(targets), g_(grammar) {}

  SearchOutcome run() {
    for (int d = g_.dil.lo; d <= g_.dil.hi; ++d) {
      if (!has_candidates(d)) continue;
      d_ = d;
      tuple_.clear();
      SearchOutcome out = walk_dilations(starts_, 0);
      if (out.found || ctx_.timed_out) return out;
    }
    return {};
  }

  // Collects every candidate surviving pruning instead of testing them.
  // Returns false when the collection cap was hit.
  bool collect(std::vector<std::vector<Step>>* survivors) {
    collecting_ = survivors;
    collect_overflow_ = false;
    for (int d = g_.dil.lo; d <= g_.dil.hi && !collect_overflow_; ++d) {
      if (!has_candidates(d)) continue;
      d_ = d;
      tuple_.clear();
      walk_dilations(starts_, 0);
      if (ctx_.timed_out) break;
    }
    collecting_ = nullptr;
    return !collect_overflow_;
  }

 private:
  // Valid erosion counts for a boundary at depth d (identity excluded, and a
  // constrained pool needs dilations to draw from).
  bool erosion_count_valid(int d, int e) const {
    if (d == 0 && e == 0) return false;
    if (g_.constrained && d == 0 && e > 0) return false;
    return e >= g_.ero.lo && e <= g_.ero.hi;
  }

  bool has_candidates(int d) const {
    for (int e = g_.ero.lo; e <= g_.ero.hi; ++e)
      if (erosion_count_valid(d, e)) return true;
    return false;
  }

  int pool_size(int d) const { return g_.constrained ? d : static_cast<int>(ctx_.lib.size()); }

  // Number of erosion-phase candidates hanging off one boundary at depth d.
  uint64_t boundary_candidates(int d) const {
    uint64_t total = 0;
    for (int e = g_.ero.lo; e <= g_.ero.hi; ++e)
      if (erosion_count_valid(d, e)) total = sat_add(total, sat_pow(pool_size(d), e));
    return total;
  }

  // Candidates below a dilation node at `depth` within the d_-walk.
  uint64_t dilation_subtree_candidates(int depth) const {
    return sat_mul(sat_pow(ctx_.lib.size(), d_ - depth), boundary_candidates(d_));
  }

  std::string multiset_key() const {
    std::string key;
    std::vector<int> sorted(tuple_);
    std::sort(sorted.begin(), sorted.end());
    for (int idx : sorted) key += static_cast<char>('0' + idx);
    return key;
  }

  SearchOutcome walk_dilations(const std::vector<BinaryBand>& state, int depth) {
    if (ctx_.expired()) return {};
    if (depth == d_) return boundary(state);
    SearchOutcome out;
    for (size_t s = 0; s < ctx_.lib.size(); ++s) {
      auto child = apply_to_all(state, Step::Op::Dilation, ctx_.lib[s]);
      tuple_.push_back(static_cast<int>(s));
      bool skip = false;
      if (ctx_.pruning) {
        std::string key = "D";
        key += static_cast<char>('0' + d_);
        key += static_cast<char>('0' + depth + 1);
        key += multiset_key();
        key += pack_states('|', child);
        if (!memo_.insert(std::move(key)).second) {
          const uint64_t killed = dilation_subtree_candidates(depth + 1);
          ctx_.stats.candidates_pruned = sat_add(ctx_.stats.candidates_pruned, killed);
          ctx_.stats.candidates_enumerated = sat_add(ctx_.stats.candidates_enumerated, killed);
          skip = true;
        }
      }
      if (!skip) {
        out = walk_dilations(child, depth + 1);
        if (out.found || ctx_.timed_out) return out;
      }
      tuple_.pop_back();
    }
    return out;
  }

  SearchOutcome boundary(const std::vector<BinaryBand>& state) {
    // R2: erosions only shrink, so a band that misses target foreground here
    // can never reach it.
    if (ctx_.pruning && !targets_.covered_by(state)) {
      const uint64_t killed = boundary_candidates(d_);
      ctx_.stats.candidates_pruned = sat_add(ctx_.stats.candidates_pruned, killed);
      ctx_.stats.candidates_enumerated = sat_add(ctx_.stats.candidates_enumerated, killed);
      return {};
    }
    SearchOutcome out;
    for (int e = g_.ero.lo; e <= g_.ero.hi; ++e) {
      if (!erosion_count_valid(d_, e)) continue;
      if (e == 0) {
        out = emit_candidate(state, {});
        if (out.found || ctx_.timed_out) return out;
        continue;
      }
      ero_positions_.clear();
      out = walk_erosions(state, 0, e);
      if (out.found || ctx_.timed_out) return out;
    }
    return out;
  }

  SearchOutcome walk_erosions(const std::vector<BinaryBand>& state, int depth, int e) {
    if (ctx_.expired()) return {};
    const int pool = pool_size(d_);
    SearchOutcome out;
    for (int pos = 0; pos < pool; ++pos) {
      const StructuringElement& se =
          g_.constrained ? ctx_.lib[tuple_[pos]] : ctx_.lib[pos];
      auto child = apply_to_all(state, Step::Op::Erosion, se);
      const uint64_t below = sat_pow(pool, e - depth - 1);
      if (ctx_.pruning && !targets_.covered_by(child)) {  // R1
        ctx_.stats.candidates_pruned = sat_add(ctx_.stats.candidates_pruned, below);
        ctx_.stats.candidates_enumerated = sat_add(ctx_.stats.candidates_enumerated, below);
        continue;
      }
      if (ctx_.pruning) {
        std::string key = "E";
        key += static_cast<char>('0' + d_);
        key += static_cast<char>('0' + e);
        key += static_cast<char>('0' + depth + 1);
        key += multiset_key();
        key += pack_states('|', child);
        if (!memo_.insert(std::move(key)).second) {
          ctx_.stats.candidates_pruned = sat_add(ctx_.stats.candidates_pruned, below);
          ctx_.stats.candidates_enumerated = sat_add(ctx_.stats.candidates_enumerated, below);
          continue;
        }
      }
      ero_positions_.push_back(pos);
      if (depth + 1 == e) {
        out = emit_candidate(child, ero_positions_);
        if (out.found || ctx_.timed_out) return out;
      } else {
        out = walk_erosions(child, depth + 1, e);
        if (out.found || ctx_.timed_out) return out;
      }
      ero_positions_.pop_back();
    }
    return out;
  }

  std::vector<Step> current_steps(const std::vector<int>& ero_positions) const {
    std::vector<Step> steps;
    steps.reserve(tuple_.size() + ero_positions.size());
    for (int idx : tuple_) steps.push_back(Step{Step::Op::Dilation, ctx_.lib[idx].id(), 1});
    for (int pos : ero_positions) {
      const StructuringElement& se = g_.constrained ? ctx_.lib[tuple_[pos]] : ctx_.lib[pos];
      steps.push_back(Step{Step::Op::Erosion, se.id(), 1});
    }
    return steps;
  }

  SearchOutcome emit_candidate(const std::vector<BinaryBand>& state,
                               const std::vector<int>& ero_positions) {
    if (collecting_) {
      if (collecting_->size() >= kCollectCap) {
        collect_overflow_ = true;
        return {};
      }
      ctx_.stats.candidates_enumerated++;
      collecting_->push_back(current_steps(ero_positions));
      return {};
    }
    ctx_.stats.candidates_enumerated++;
    ctx_.stats.candidates_tested++;
    if (targets_.matches(state)) return SearchOutcome{true, current_steps(ero_positions), state};
    return {};
  }

  Ctx& ctx_;
  const std::vector<BinaryBand>& starts_;
  const TargetSpec& targets_;
  PhaseGrammar g_;
  int d_ = 0;
  std::vector<int> tuple_;
  std::vector<int> ero_positions_;
  std::unordered_set<std::string> memo_;
  std::vector<std::vector<Step>>* collecting_ = nullptr;
  bool collect_overflow_ = false;
};

// Randomised variant: collect the pruned stream, test a uniform sample
// first, then the remaining survivors in stream order. The sampled
// candidates are a strict subset of the pruned stream, and the reordering
// keeps the search complete.
SearchOutcome phased_search_randomized(Ctx& ctx, const std::vector<BinaryBand>& starts,
                                       const TargetSpec& targets, const PhaseGrammar& grammar,
                                       uint64_t seed) {
  PhasedSearch search(ctx, starts, targets, grammar);
  std::vector<std::vector<Step>> survivors;
  if (!search.collect(&survivors) ) {
    // Collection overflowed; fall back to the deterministic order.
    PhasedSearch retry(ctx, starts, targets, grammar);
    return retry.run();
  }
  if (ctx.timed_out) return {};

  // Reservoir-sample survivor indices (algorithm R).
  const size_t n = std::min<size_t>(ctx.cfg.sample_count, survivors.size());
  std::vector<size_t> picked;
  picked.reserve(n);
  Rng rng(seed);
  for (size_t i = 0; i < survivors.size(); ++i) {
    if (picked.size() < n)
      picked.push_back(i);
    else {
      const uint64_t slot = rng.below(i + 1);
      if (slot < n) picked[slot] = i;
    }
  }

  std::vector<bool> sampled(survivors.size(), false);
  auto test = [&](size_t idx) -> SearchOutcome {
    ctx.stats.candidates_tested++;
    auto finals = run_steps(starts, survivors[idx], ctx.lib);
    if (targets.matches(finals)) return SearchOutcome{true, survivors[idx], std::move(finals)};
    return {};
  };
  for (size_t idx : picked) {
    sampled[idx] = true;
    if (ctx.expired()) return {};
    SearchOutcome out = test(idx);
    if (out.found) return out;
  }
  for (size_t idx = 0; idx < survivors.size(); ++idx) {
    if (sampled[idx]) continue;
    if (ctx.expired()) return {};
    SearchOutcome out = test(idx);
    if (out.found) return out;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Iteration templates: Iterate a Dilation s then Iterate b Erosion s with the
// same SE, the shape of every printed iteration solution. Partial templates
// (a or b zero) cover snapshot segments.

SearchOutcome template_search(Ctx& ctx, const std::vector<BinaryBand>& starts,
                              const TargetSpec& targets) {
  for (int a = 0; a <= ctx.cfg.max_iterate; ++a) {
    for (int b = 0; b <= ctx.cfg.max_iterate; ++b) {
      if (a == 0 && b == 0) continue;  // identity is tested by the priority pass
      for (size_t s = 0; s < ctx.lib.size(); ++s) {
        if (ctx.expired()) return {};
        std::vector<Step> steps;
        for (int i = 0; i < a; ++i) steps.push_back(Step{Step::Op::Dilation, ctx.lib[s].id(), 1});
        for (int i = 0; i < b; ++i) steps.push_back(Step{Step::Op::Erosion, ctx.lib[s].id(), 1});
        auto finals = run_steps(starts, steps, ctx.lib);
        ctx.stats.candidates_enumerated++;
        ctx.stats.candidates_tested++;
        if (targets.matches(finals))
          return SearchOutcome{true, std::move(steps), std::move(finals)};
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Rule hypotheses: candidate colour rules consistent with the outputs, each
// inducing per-band targets. Envelope masks (the furthest any band can ever
// dilate) bound which pixels a band can reach and are sound because every
// library SE fits inside the envelope square.

struct Hypothesis {
  ColorRule rule;
  TargetSpec t1, t2;
};

int library_radius(const SELibrary& lib) {
  int radius = 1;
  for (const auto& se : lib)
    for (const auto& [dr, dc] : se.fg_offsets())
      radius = std::max({radius, std::abs(dr), std::abs(dc)});
  return radius;
}

std::vector<BinaryBand> dilation_envelopes(const std::vector<BinaryBand>& sources,
                                           const SELibrary& lib, int max_dilations) {
  const int radius = library_radius(lib);
  const int side = 2 * radius + 1;
  std::vector<SeCell> cells(static_cast<size_t>(side) * side, SeCell::Fg);
  StructuringElement square("~env", side, side, cells);
  std::vector<BinaryBand> env = sources;
  for (int i = 0; i < max_dilations; ++i)
    for (auto& band : env) band = dilate(band, square);
  return env;
}

std::vector<Hypothesis> enumerate_hypotheses(const std::vector<Image>& outputs,
                                             const std::vector<BinaryBand>& env1,
                                             const std::vector<BinaryBand>& env2,
                                             bool use_envelopes) {
  // Colours a rule may output: everything observed plus 0.
  std::set<int> colour_set{0};
  for (const auto& out : outputs)
    for (int v : out.cells) colour_set.insert(v);
  const std::vector<int> colours(colour_set.begin(), colour_set.end());

  const size_t pairs = outputs.size();
  std::vector<Hypothesis> hypotheses;
  std::array<int, 4> assign{};  // indexed by b1*2+b2

  auto consider = [&] {
    ColorRule rule;
    for (int b1 = 0; b1 <= 1; ++b1)
      for (int b2 = 0; b2 <= 1; ++b2) rule.set(b1, b2, assign[b1 * 2 + b2]);

    Hypothesis hyp;
    hyp.rule = rule;
    for (size_t p = 0; p < pairs; ++p) {
      const Image& out = outputs[p];
      hyp.t1.must1.emplace_back(out.width, out.height);
      hyp.t1.must0.emplace_back(out.width, out.height);
      hyp.t2.must1.emplace_back(out.width, out.height);
      hyp.t2.must0.emplace_back(out.width, out.height);
    }
    for (size_t p = 0; p < pairs; ++p) {
      const Image& out = outputs[p];
      for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c) {
          const int colour = out.at(r, c);
          bool a0 = false, a1 = false, b0 = false, b1v = false;
          int count = 0;
          for (int a = 0; a <= 1; ++a)
            for (int b = 0; b <= 1; ++b) {
              if (assign[a * 2 + b] != colour) continue;
              if (use_envelopes && a == 1 && !env1[p].at(r, c)) continue;
              if (use_envelopes && b == 1 && !env2[p].at(r, c)) continue;
              (a ? a1 : a0) = true;
              (b ? b1v : b0) = true;
              ++count;
            }
          if (count == 0) return;  // no band values can produce this pixel
          // Reject couplings: the allowed set must be a product so the two
          // band searches stay independent.
          const int product = (a0 + a1) * (b0 + b1v);
          if (count != product) return;
          if (a1 && !a0) hyp.t1.must1[p].set(r, c, true);
          if (a0 && !a1) hyp.t1.must0[p].set(r, c, true);
          if (b1v && !b0) hyp.t2.must1[p].set(r, c, true);
          if (b0 && !b1v) hyp.t2.must0[p].set(r, c, true);
        }
    }
    hypotheses.push_back(std::move(hyp));
  };

  for (int i00 : colours)
    for (int i01 : colours)
      for (int i10 : colours)
        for (int i11 : colours) {
          assign = {i00, i01, i10, i11};
          consider();
        }
  return hypotheses;
}

// ---------------------------------------------------------------------------
// The per-category engines.

enum class BandKind { Sequence, Phased, TemplateThenSequence };

struct BandSpec {
  std::vector<BinaryBand> starts;
  BandKind kind = BandKind::Sequence;
  PhaseGrammar grammar;
  int max_len = 6;
  int max_dilations = 0;  // for envelopes
  std::string scope;
  uint64_t sample_seed = 0;
};

struct Options {
  bool relaxed_grammar = false;
  bool force_code_rule = false;
};

class Solver {
 public:
  Solver(const Task& task, const SynthConfig& cfg, const SELibrary& lib,
         const MacroLibrary& macros, const Options& options)
      : task_(task), cfg_(cfg), lib_(lib), macros_(macros), options_(options), ctx_(cfg, lib) {}

  SolveResult run() {
    const auto started = Clock::now();
    cfg_.validate();
    SolveResult result;
    switch (task_.category) {
      case Category::ASimple:
      case Category::BSequence:
        result = solve_single_band(BandKind::Sequence);
        break;
      case Category::BIteration:
        result = solve_single_band(BandKind::TemplateThenSequence);
        break;
      case Category::AHard:
        result = solve_rule_bands(std::nullopt);
        break;
      case Category::BSelection:
        result = solve_split(BandKind::Sequence, BandKind::Sequence);
        break;
      case Category::BHard:
        result = solve_split(BandKind::TemplateThenSequence, BandKind::Phased);
        break;
    }
    result.stats = ctx_.stats;
    result.stats.solved = result.program.has_value();
    result.stats.elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
    return result;
  }

 private:
  PhaseGrammar phase_grammar() const {
    if (options_.relaxed_grammar)
      return PhaseGrammar{IntRange{0, std::max(cfg_.dilation_counts.hi, cfg_.max_iterate)},
                          IntRange{0, std::max(cfg_.erosion_counts.hi, cfg_.max_iterate)}, false};
    return PhaseGrammar{cfg_.dilation_counts, cfg_.erosion_counts,
                        cfg_.erosion_ses_from_dilations};
  }

  SearchOutcome search_band(const BandSpec& spec, const TargetSpec& targets) {
    const std::string key = targets.cache_key(spec.scope);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    SearchOutcome outcome;
    if (auto hit = priority_pass(ctx_, spec.starts, targets, macros_.for_category(task_.category)))
      outcome = *hit;
    if (!outcome.found && !ctx_.timed_out) {
      switch (spec.kind) {
        case BandKind::Sequence:
          outcome = SequenceSearch(ctx_, spec.starts, targets, spec.max_len).run();
          break;
        case BandKind::Phased:
          if (cfg_.randomization_enabled && ctx_.pruning)
            outcome = phased_search_randomized(ctx_, spec.starts, targets, spec.grammar,
                                               spec.sample_seed);
          else
            outcome = PhasedSearch(ctx_, spec.starts, targets, spec.grammar).run();
          break;
        case BandKind::TemplateThenSequence:
          outcome = template_search(ctx_, spec.starts, targets);
          if (!outcome.found && !ctx_.timed_out)
            outcome = SequenceSearch(ctx_, spec.starts, targets, spec.max_len).run();
          break;
      }
    }
    if (!ctx_.timed_out) cache_.emplace(key, outcome);
    return outcome;
  }

  BandSpec make_band_spec(std::vector<BinaryBand> starts, BandKind kind,
                          const std::string& scope, uint64_t salt) {
    BandSpec spec;
    spec.starts = std::move(starts);
    spec.kind = kind;
    spec.grammar = phase_grammar();
    spec.max_len = cfg_.max_seq_len;
    switch (kind) {
      case BandKind::Sequence: spec.max_dilations = cfg_.max_seq_len; break;
      case BandKind::Phased: spec.max_dilations = spec.grammar.dil.hi; break;
      case BandKind::TemplateThenSequence:
        spec.max_dilations = std::max(cfg_.max_iterate, cfg_.max_seq_len);
        break;
    }
    spec.scope = scope;
    spec.sample_seed = cfg_.seed * 0x9E3779B97F4A7C15ull + salt;
    return spec;
  }

  // Single-band categories: the program output is the band indicator, so
  // outputs must be 0/1 images and the target is their foreground.
  SolveResult solve_single_band(BandKind kind) {
    for (const auto& pair : task_.pairs)
      for (int v : pair.output.cells)
        if (v > 1) return {};  // no single-band program emits colours >= 2

    std::vector<BinaryBand> starts, goals;
    for (const auto& pair : task_.pairs) {
      starts.push_back(foreground_band(pair.input));
      goals.push_back(foreground_band(pair.output));
    }
    const TargetSpec targets = TargetSpec::exact(std::move(goals));
    BandSpec spec = make_band_spec(std::move(starts), kind, "band1", 1);
    SearchOutcome outcome = search_band(spec, targets);
    if (!outcome.found) return {};

    MorphProgram program;
    if (!outcome.steps.empty()) program.pipelines.push_back(BandPipeline{1, outcome.steps});
    program = fold_iterations(program).normalized();
    if (!verify(program, task_, lib_)) return {};
    return {program, {}};
  }

  // Two colour-class bands combined by an unknown rule (the A-hard shape).
  SolveResult solve_rule_bands(const std::optional<std::string>& split_se) {
    std::vector<Image> outputs;
    for (const auto& pair : task_.pairs) outputs.push_back(pair.output);

    std::vector<BinaryBand> src1, src2;
    for (const auto& pair : task_.pairs) {
      if (split_se) {
        const Image split = hit_or_miss_colored(pair.input, lib_.at(*split_se));
        src1.push_back(extract_band(split, 1));
        src2.push_back(extract_band(split, 2));
      } else {
        src1.push_back(color_class_band(pair.input, 1));
        src2.push_back(color_class_band(pair.input, 2));
      }
    }
    const BandKind kind1 = split_se ? split_band1_kind_ : BandKind::Phased;
    const BandKind kind2 = split_se ? split_band2_kind_ : BandKind::Phased;
    const std::string scope = split_se ? "split:" + *split_se : "bands";
    BandSpec spec1 = make_band_spec(src1, kind1, scope + ":1", 1);
    BandSpec spec2 = make_band_spec(src2, kind2, scope + ":2", 2);

    std::vector<Hypothesis> hypotheses;
    if (options_.force_code_rule) {
      // Snapshot segments target the canonical band code exactly.
      Hypothesis hyp;
      hyp.rule.set(0, 0, 0);
      hyp.rule.set(0, 1, 2);
      hyp.rule.set(1, 0, 1);
      hyp.rule.set(1, 1, 3);
      std::vector<BinaryBand> g1, g2;
      for (const auto& out : outputs) {
        g1.push_back(color_class_band(out, 1));
        g2.push_back(color_class_band(out, 2));
      }
      hyp.t1 = TargetSpec::exact(std::move(g1));
      hyp.t2 = TargetSpec::exact(std::move(g2));
      hypotheses.push_back(std::move(hyp));
    } else {
      const bool use_env = lib_.all_origins_fg();
      const auto env1 = dilation_envelopes(spec1.starts, lib_, spec1.max_dilations);
      const auto env2 = dilation_envelopes(spec2.starts, lib_, spec2.max_dilations);
      hypotheses = enumerate_hypotheses(outputs, env1, env2, use_env);
    }

    for (const auto& hyp : hypotheses) {
      if (ctx_.expired()) return {};
      SearchOutcome out1 = search_band(spec1, hyp.t1);
      if (!out1.found) continue;
      SearchOutcome out2 = search_band(spec2, hyp.t2);
      if (!out2.found) continue;

      const auto inferred = infer_color_rule(out1.finals, out2.finals, outputs);
      if (std::holds_alternative<RuleConflict>(inferred)) continue;

      MorphProgram program;
      program.split_se = split_se;
      if (!out1.steps.empty()) program.pipelines.push_back(BandPipeline{1, out1.steps});
      if (!out2.steps.empty()) program.pipelines.push_back(BandPipeline{2, out2.steps});
      program.color_rule = std::get<ColorRule>(inferred);
      program = fold_iterations(program).normalized();
      if (verify(program, task_, lib_)) return {program, {}};
    }
    return {};
  }

  SolveResult solve_split(BandKind band1_kind, BandKind band2_kind) {
    split_band1_kind_ = band1_kind;
    split_band2_kind_ = band2_kind;
    for (const auto& se : lib_) {
      if (ctx_.expired()) return {};
      SolveResult result = solve_rule_bands(se.id());
      if (result.program) return result;
    }
    return {};
  }

  Task task_;
  SynthConfig cfg_;
  const SELibrary& lib_;
  const MacroLibrary& macros_;
  Options options_;
  Ctx ctx_;
  std::map<std::string, SearchOutcome> cache_;
  BandKind split_band1_kind_ = BandKind::Sequence;
  BandKind split_band2_kind_ = BandKind::Phased;
};

SolveResult solve_impl(const Task& task, const SynthConfig& cfg, const SELibrary& lib,
                       const MacroLibrary& macros, const Options& options) {
  return Solver(task, cfg, lib, macros, options).run();
}

}  // namespace

SolveResult solve(const Task& task, const SynthConfig& cfg, const SELibrary& lib,
                  const MacroLibrary& macros) {
  return solve_impl(task, cfg, lib, macros, {});
}

SolveResult solve_with_snapshots(const Task& task, const SynthConfig& cfg, const SELibrary& lib,
                                 const MacroLibrary& macros) {
  cfg.validate();
  if (task.pairs.empty() || task.pairs[0].snapshots.empty())
    throw std::invalid_argument("solve_with_snapshots needs at least one snapshot per pair");
  if (task.category == Category::BSelection || task.category == Category::BHard)
    throw std::invalid_argument("snapshot splitting is not supported for split categories");
  const size_t s = task.pairs[0].snapshots.size();

  SynthConfig segment_cfg = cfg;
  segment_cfg.time_budget = cfg.time_budget / static_cast<int64_t>(s + 1);
  if (segment_cfg.time_budget.count() < 1) segment_cfg.time_budget = std::chrono::milliseconds(1);

  SearchStats merged;
  std::vector<MorphProgram> segments;
  for (size_t i = 0; i <= s; ++i) {
    Task segment;
    segment.id = task.id + "#seg" + std::to_string(i);
    segment.category = task.category;
    segment.num_colors = task.num_colors;
    for (const auto& pair : task.pairs) {
      TaskPair seg_pair;
      seg_pair.input = i == 0 ? pair.input : pair.snapshots[i - 1];
      seg_pair.output = i == s ? pair.output : pair.snapshots[i];
      segment.pairs.push_back(std::move(seg_pair));
    }
    Options options;
    options.relaxed_grammar = true;
    options.force_code_rule = task.category == Category::AHard && i < s;
    SolveResult result = solve_impl(segment, segment_cfg, lib, macros, options);
    merged.merge(result.stats);
    if (!result.program) {
      merged.solved = false;
      return {std::nullopt, merged};
    }
    segments.push_back(std::move(*result.program));
  }

  // Concatenate segment pipelines band-wise; the rule of the last segment
  // renders the final image.
  MorphProgram program;
  for (int band = 1; band <= 2; ++band) {
    std::vector<Step> steps;
    for (const auto& seg : segments) {
      const MorphProgram flat = unfold_iterations(seg);
      if (const BandPipeline* p = flat.pipeline(band))
        steps.insert(steps.end(), p->steps.begin(), p->steps.end());
    }
    if (!steps.empty()) program.pipelines.push_back(BandPipeline{band, std::move(steps)});
  }
  program.color_rule = segments.back().color_rule;
  program = fold_iterations(program).normalized();

  if (!verify(program, task, lib)) {
    merged.solved = false;
    return {std::nullopt, merged};
  }
  merged.solved = true;
  return {program, merged};
}

}  // namespace iparc
