#include <algorithm>
#include <cctype>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>

#include "iparc/errors.hpp"
#include "iparc/morphology.hpp"
#include "iparc/rng.hpp"
#include "iparc/synth.hpp"

namespace iparc {

using nlohmann::json;

void SynthConfig::validate() const {
  if (max_seq_len < 1) throw std::invalid_argument("max_seq_len must be >= 1");
  if (!dilation_counts.valid()) throw std::invalid_argument("dilation_counts range is empty");
  if (!erosion_counts.valid()) throw std::invalid_argument("erosion_counts range is empty");
  if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
  if (max_iterate < 1) throw std::invalid_argument("max_iterate must be >= 1");
  if (time_budget.count() <= 0) throw std::invalid_argument("time_budget must be positive");
}

std::chrono::milliseconds parse_duration(const std::string& text) {
  size_t suffix = 0;
  double value;
  try {
    value = std::stod(text, &suffix);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse duration '" + text + "'");
  }
  std::string unit = text.substr(suffix);
  unit.erase(std::remove_if(unit.begin(), unit.end(), ::isspace), unit.end());
  double ms;
  if (unit.empty() || unit == "s")
    ms = value * 1000.0;
  else if (unit == "ms")
    ms = value;
  else if (unit == "m")
    ms = value * 60'000.0;
  else if (unit == "h")
    ms = value * 3'600'000.0;
  else
    throw std::invalid_argument("unknown duration unit '" + unit + "'");
  if (ms <= 0) throw std::invalid_argument("duration must be positive");
  return std::chrono::milliseconds(static_cast<int64_t>(ms));
}

namespace {

IntRange range_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw SchemaError(name, "expected a [lo, hi] integer pair");
  return IntRange{j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

SynthConfig synth_config_from_json(const std::string& text, SynthConfig base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError("<config>", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("<config>", "expected a JSON object");
  SynthConfig cfg = base;
  for (const auto& [key, value] : doc.items()) {
    if (key == "max_seq_len")
      cfg.max_seq_len = value.get<int>();
    else if (key == "dilation_counts")
      cfg.dilation_counts = range_from_json(value, "dilation_counts");
    else if (key == "erosion_counts")
      cfg.erosion_counts = range_from_json(value, "erosion_counts");
    else if (key == "erosion_ses_from_dilations")
      cfg.erosion_ses_from_dilations = value.get<bool>();
    else if (key == "sample_count")
      cfg.sample_count = value.get<int>();
    else if (key == "seed")
      cfg.seed = value.get<uint64_t>();
    else if (key == "time_budget")
      cfg.time_budget = value.is_string() ? parse_duration(value.get<std::string>())
                                          : std::chrono::milliseconds(static_cast<int64_t>(
                                                value.get<double>() * 1000.0));
    else if (key == "pruning_enabled")
      cfg.pruning_enabled = value.get<bool>();
    else if (key == "randomization_enabled")
      cfg.randomization_enabled = value.get<bool>();
    else if (key == "max_iterate")
      cfg.max_iterate = value.get<int>();
    else
      throw SchemaError(key, "unknown config field");
  }
  cfg.validate();
  return cfg;
}

std::string synth_config_to_json(const SynthConfig& cfg) {
  json doc;
  doc["max_seq_len"] = cfg.max_seq_len;
  doc["dilation_counts"] = {cfg.dilation_counts.lo, cfg.dilation_counts.hi};
  doc["erosion_counts"] = {cfg.erosion_counts.lo, cfg.erosion_counts.hi};
  doc["erosion_ses_from_dilations"] = cfg.erosion_ses_from_dilations;
  doc["sample_count"] = cfg.sample_count;
  doc["seed"] = cfg.seed;
  doc["time_budget"] = std::to_string(cfg.time_budget.count()) + "ms";
  doc["pruning_enabled"] = cfg.pruning_enabled;
  doc["randomization_enabled"] = cfg.randomization_enabled;
  doc["max_iterate"] = cfg.max_iterate;
  return doc.dump(1);
}

double SearchStats::reduction_factor() const {
  if (candidates_enumerated == 0) return 1.0;
  const uint64_t surviving = candidates_enumerated - candidates_pruned;
  if (surviving == 0) return static_cast<double>(candidates_enumerated);
  return static_cast<double>(candidates_enumerated) / static_cast<double>(surviving);
}

void SearchStats::merge(const SearchStats& other) {
  candidates_enumerated += other.candidates_enumerated;
  candidates_pruned += other.candidates_pruned;
  candidates_tested += other.candidates_tested;
  elapsed += other.elapsed;
  solved = solved || other.solved;
}

// ---------------------------------------------------------------------------
// Candidate streams

SequenceStream::SequenceStream(std::vector<Step::Op> ops, std::vector<std::string> se_ids,
                               int max_len)
    : ops_(std::move(ops)), se_ids_(std::move(se_ids)), max_len_(max_len) {
  if (ops_.empty() || se_ids_.empty() || max_len_ < 1)
    throw std::invalid_argument("sequence stream needs ops, SE ids and max_len >= 1");
  digits_.assign(1, 0);
}

std::optional<CandidateSequence> SequenceStream::next() {
  if (done_) return std::nullopt;
  const int base = static_cast<int>(ops_.size() * se_ids_.size());
  CandidateSequence out;
  out.steps.reserve(digits_.size());
  for (int digit : digits_) {
    const int op_idx = digit / static_cast<int>(se_ids_.size());
    const int se_idx = digit % static_cast<int>(se_ids_.size());
    out.steps.push_back(Step{ops_[op_idx], se_ids_[se_idx], 1});
  }
  // Advance the odometer, least significant digit last.
  int i = static_cast<int>(digits_.size()) - 1;
  while (i >= 0 && digits_[i] == base - 1) digits_[i--] = 0;
  if (i >= 0) {
    ++digits_[i];
  } else {
    if (len_ == max_len_) {
      done_ = true;
    } else {
      digits_.assign(static_cast<size_t>(++len_), 0);
    }
  }
  return out;
}

uint64_t SequenceStream::total_count() const {
  const uint64_t base = ops_.size() * se_ids_.size();
  uint64_t total = 0, power = 1;
  for (int l = 1; l <= max_len_; ++l) {
    power *= base;
    total += power;
  }
  return total;
}

Band2Stream::Band2Stream(std::vector<std::string> se_ids, IntRange dilation_counts,
                         IntRange erosion_counts, bool erosion_ses_from_dilations)
    : se_ids_(std::move(se_ids)),
      dil_(dilation_counts),
      ero_(erosion_counts),
      constrained_(erosion_ses_from_dilations) {
  if (se_ids_.empty()) throw std::invalid_argument("band-2 stream needs SE ids");
  if (!dil_.valid() || !ero_.valid()) throw std::invalid_argument("empty band-2 stream ranges");
  // Position on the first candidate, if any.
  for (d_ = dil_.lo; d_ <= dil_.hi; ++d_) {
    const auto e = first_erosion_count(d_, ero_.lo);
    if (e) {
      e_ = *e;
      dil_digits_.assign(static_cast<size_t>(d_), 0);
      ero_digits_.assign(static_cast<size_t>(e_), 0);
      return;
    }
  }
  done_ = true;
}

Band2Stream Band2Stream::from_config(const SELibrary& lib, const SynthConfig& cfg) {
  return Band2Stream(lib.ids(), cfg.dilation_counts, cfg.erosion_counts,
                     cfg.erosion_ses_from_dilations);
}

// The identity candidate (d = 0, e = 0) is excluded, and a constrained
// erosion phase is impossible without dilations to draw SEs from.
std::optional<int> Band2Stream::first_erosion_count(int d, int from) const {
  for (int e = from; e <= ero_.hi; ++e) {
    if (d == 0 && e == 0) continue;
    if (constrained_ && d == 0 && e > 0) continue;
    return e;
  }
  return std::nullopt;
}

uint64_t Band2Stream::cell_count(int d, int e) const {
  if (d == 0 && e == 0) return 0;
  const uint64_t n = se_ids_.size();
  uint64_t dil = 1;
  for (int i = 0; i < d; ++i) dil *= n;
  const uint64_t pool = constrained_ ? static_cast<uint64_t>(d) : n;
  uint64_t ero = 1;
  for (int i = 0; i < e; ++i) ero *= pool;
  return dil * ero;
}

uint64_t Band2Stream::total_count() const {
  uint64_t total = 0;
  for (int d = dil_.lo; d <= dil_.hi; ++d)
    for (int e = ero_.lo; e <= ero_.hi; ++e) total += cell_count(d, e);
  return total;
}

std::optional<CandidateSequence> Band2Stream::next() {
  if (done_) return std::nullopt;
  CandidateSequence out;
  out.steps.reserve(dil_digits_.size() + ero_digits_.size());
  for (int digit : dil_digits_) out.steps.push_back(Step{Step::Op::Dilation, se_ids_[digit], 1});
  for (int digit : ero_digits_) {
    const std::string& id = constrained_ ? se_ids_[dil_digits_[digit]] : se_ids_[digit];
    out.steps.push_back(Step{Step::Op::Erosion, id, 1});
  }
  if (!advance()) done_ = true;
  return out;
}

// Order: d ascending, dilation tuple lexicographic, e ascending, erosion
// choices lexicographic. Matches the engines' walk order.
bool Band2Stream::advance() {
  const int n = static_cast<int>(se_ids_.size());
  const int pool = constrained_ ? d_ : n;
  // Erosion digits are the fastest-moving.
  int i = static_cast<int>(ero_digits_.size()) - 1;
  while (i >= 0 && ero_digits_[i] == pool - 1) ero_digits_[i--] = 0;
  if (i >= 0) {
    ++ero_digits_[i];
    return true;
  }
  if (auto e = first_erosion_count(d_, e_ + 1)) {
    e_ = *e;
    ero_digits_.assign(static_cast<size_t>(e_), 0);
    return true;
  }
  // Next dilation tuple for the same d, then the next d.
  int j = static_cast<int>(dil_digits_.size()) - 1;
  while (j >= 0 && dil_digits_[j] == n - 1) dil_digits_[j--] = 0;
  if (j >= 0) {
    ++dil_digits_[j];
  } else {
    int d = d_ + 1;
    for (; d <= dil_.hi; ++d)
      if (first_erosion_count(d, ero_.lo)) break;
    if (d > dil_.hi) return false;
    d_ = d;
    dil_digits_.assign(static_cast<size_t>(d_), 0);
  }
  e_ = *first_erosion_count(d_, ero_.lo);
  ero_digits_.assign(static_cast<size_t>(e_), 0);
  return true;
}

std::vector<CandidateSequence> sample_candidates(CandidateStream& stream, int n, uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
  // Reservoir sampling (algorithm R).
  std::vector<CandidateSequence> reservoir;
  reservoir.reserve(static_cast<size_t>(n));
  Rng rng(seed);
  uint64_t index = 0;
  while (auto candidate = stream.next()) {
    if (reservoir.size() < static_cast<size_t>(n)) {
      reservoir.push_back(std::move(*candidate));
    } else {
      const uint64_t slot = rng.below(index + 1);
      if (slot < static_cast<uint64_t>(n)) reservoir[slot] = std::move(*candidate);
    }
    ++index;
  }
  return reservoir;
}

// ---------------------------------------------------------------------------
// Pruning (public surface; the engines inline the same rules)

bool PruneMemo::check_and_insert(const std::string& key) { return !seen_.insert(key).second; }

PruneDecision prune(const CandidateSequence& prefix, const std::vector<TaskPair>& pairs,
                    const SELibrary& lib, bool at_phase_boundary, PruneMemo* memo) {
  bool erosion_begun = false;
  std::vector<BinaryBand> states;
  states.reserve(pairs.size());
  std::vector<BinaryBand> targets;
  for (const auto& pair : pairs) {
    states.push_back(foreground_band(pair.input));
    targets.push_back(foreground_band(pair.output));
  }
  for (const auto& step : prefix.steps) {
    const StructuringElement& se = lib.at(step.se_id);
    for (int i = 0; i < step.count; ++i)
      for (auto& state : states)
        state = step.op == Step::Op::Erosion ? erode(state, se) : dilate(state, se);
    if (step.op == Step::Op::Erosion) erosion_begun = true;
  }

  auto covers_all = [&] {
    for (size_t i = 0; i < states.size(); ++i)
      if (!states[i].covers(targets[i])) return false;
    return true;
  };
  if (erosion_begun && !covers_all()) return {true, PruneReason::ErosionCoverage};
  if (at_phase_boundary && !covers_all()) return {true, PruneReason::BoundaryCoverage};
  if (memo) {
    std::string key;
    key += erosion_begun ? 'E' : 'D';
    key += static_cast<char>(prefix.steps.size());
    for (const auto& state : states) state.append_key(key);
    if (memo->check_and_insert(key)) return {true, PruneReason::Duplicate};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Colour rule inference and verification

std::variant<ColorRule, RuleConflict> infer_color_rule(const std::vector<BinaryBand>& band1s,
                                                       const std::vector<BinaryBand>& band2s,
                                                       const std::vector<Image>& outputs) {
  int mapping[2][2] = {{-1, -1}, {-1, -1}};
  for (size_t p = 0; p < outputs.size(); ++p) {
    const Image& out = outputs[p];
    for (int r = 0; r < out.height; ++r)
      for (int c = 0; c < out.width; ++c) {
        const int b1 = band1s[p].at(r, c) ? 1 : 0;
        const int b2 = band2s[p].at(r, c) ? 1 : 0;
        const int colour = out.at(r, c);
        int& slot = mapping[b1][b2];
        if (slot < 0)
          slot = colour;
        else if (slot != colour)
          return RuleConflict{p, r, c, b1, b2, slot, colour};
      }
  }
  ColorRule rule;
  for (int b1 = 0; b1 <= 1; ++b1)
    for (int b2 = 0; b2 <= 1; ++b2) rule.set(b1, b2, mapping[b1][b2] < 0 ? 0 : mapping[b1][b2]);
  return rule;
}

bool verify(const MorphProgram& program, const Task& task, const SELibrary& lib) {
  try {
    for (const auto& pair : task.pairs)
      if (!(run_program(program, pair.input, lib) == pair.output)) return false;
  } catch (const Error&) {
    return false;
  } catch (const std::invalid_argument&) {
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Macro mining

void MacroLibrary::add(Category category, Macro macro) {
  macros_[category].push_back(std::move(macro));
}

const std::vector<Macro>& MacroLibrary::for_category(Category category) const {
  static const std::vector<Macro> kEmpty;
  auto it = macros_.find(category);
  return it == macros_.end() ? kEmpty : it->second;
}

size_t MacroLibrary::total_size() const {
  size_t n = 0;
  for (const auto& [_, v] : macros_) n += v.size();
  return n;
}

namespace {

std::string steps_key(const std::vector<Step>& steps) {
  std::string key;
  for (const auto& s : steps) {
    key += s.op == Step::Op::Dilation ? 'D' : s.op == Step::Op::Erosion ? 'E' : 'H';
    key += s.se_id;
    key += ';';
  }
  return key;
}

}  // namespace

MacroLibrary mine_macros(const std::vector<std::pair<Task, MorphProgram>>& solved) {
  struct Entry {
    std::vector<Step> steps;
    std::set<size_t> support;
  };
  std::map<Category, std::map<std::string, Entry>> by_category;

  for (size_t idx = 0; idx < solved.size(); ++idx) {
    const auto& [task, program] = solved[idx];
    const MorphProgram flat = unfold_iterations(program);
    for (const auto& pipe : flat.pipelines) {
      const auto& steps = pipe.steps;
      for (size_t start = 0; start < steps.size(); ++start)
        for (size_t len = 2; start + len <= steps.size(); ++len) {
          std::vector<Step> sub(steps.begin() + start, steps.begin() + start + len);
          Entry& entry = by_category[task.category][steps_key(sub)];
          if (entry.steps.empty()) entry.steps = std::move(sub);
          entry.support.insert(idx);
        }
    }
  }

  MacroLibrary lib;
  for (auto& [category, entries] : by_category) {
    std::vector<Entry*> frequent;
    for (auto& [_, entry] : entries)
      if (entry.support.size() >= 2) frequent.push_back(&entry);
    // Keep only maximal entries: no strictly longer frequent sub-pipeline
    // with the same supporting programs may contain them.
    auto contains = [](const std::vector<Step>& hay, const std::vector<Step>& needle) {
      if (needle.size() > hay.size()) return false;
      for (size_t i = 0; i + needle.size() <= hay.size(); ++i)
        if (std::equal(needle.begin(), needle.end(), hay.begin() + i)) return true;
      return false;
    };
    std::vector<Entry*> kept;
    for (Entry* e : frequent) {
      bool subsumed = false;
      for (Entry* other : frequent)
        if (other != e && other->steps.size() > e->steps.size() &&
            other->support == e->support && contains(other->steps, e->steps)) {
          subsumed = true;
          break;
        }
      if (!subsumed) kept.push_back(e);
    }
    std::sort(kept.begin(), kept.end(), [](const Entry* a, const Entry* b) {
      if (a->support.size() != b->support.size()) return a->support.size() > b->support.size();
      if (a->steps.size() != b->steps.size()) return a->steps.size() > b->steps.size();
      return steps_key(a->steps) < steps_key(b->steps);
    });
    for (const Entry* e : kept)
      lib.add(category, Macro{e->steps, static_cast<int>(e->support.size())});
  }
  return lib;
}

}  // namespace iparc
