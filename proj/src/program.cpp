#include "iparc/program.hpp"

#include <algorithm>
#include <set>

#include "iparc/errors.hpp"

namespace iparc {

std::string op_name(Step::Op op) {
  switch (op) {
    case Step::Op::Dilation: return "Dilation";
    case Step::Op::Erosion: return "Erosion";
    case Step::Op::HitOrMiss: return "Hit-Or-Miss";
  }
  return "?";
}

const BandPipeline* MorphProgram::pipeline(int band_id) const {
  for (const auto& p : pipelines)
    if (p.band_id == band_id) return &p;
  return nullptr;
}

std::vector<Step>& MorphProgram::steps_for(int band_id) {
  for (auto& p : pipelines)
    if (p.band_id == band_id) return p.steps;
  pipelines.push_back(BandPipeline{band_id, {}});
  std::sort(pipelines.begin(), pipelines.end(),
            [](const BandPipeline& a, const BandPipeline& b) { return a.band_id < b.band_id; });
  for (auto& p : pipelines)
    if (p.band_id == band_id) return p.steps;
  return pipelines.back().steps;  // unreachable
}

MorphProgram MorphProgram::normalized() const {
  MorphProgram out;
  out.split_se = split_se;
  out.color_rule = color_rule;
  for (const auto& p : pipelines)
    if (!p.steps.empty()) out.pipelines.push_back(p);
  std::sort(out.pipelines.begin(), out.pipelines.end(),
            [](const BandPipeline& a, const BandPipeline& b) { return a.band_id < b.band_id; });
  return out;
}

std::optional<std::string> MorphProgram::check() const {
  std::set<int> seen;
  for (const auto& p : pipelines) {
    if (p.band_id < 1) return "band ids must be >= 1";
    if (!seen.insert(p.band_id).second)
      return "duplicate pipeline for band " + std::to_string(p.band_id);
    for (const auto& s : p.steps)
      if (s.count < 1) return "iteration count must be >= 1";
  }
  const bool combining = split_se.has_value() || color_rule.has_value();
  if (split_se && !color_rule) return "a split requires a colour rule";
  if (combining) {
    for (const auto& p : pipelines)
      if (p.band_id > 2) return "combining programs use bands 1 and 2 only";
  } else {
    for (const auto& p : pipelines)
      if (p.band_id != 1 && !p.steps.empty())
        return "a program without a colour rule has a single band-1 pipeline";
  }
  return std::nullopt;
}

BinaryBand run_pipeline(const std::vector<Step>& steps, BinaryBand band, const SELibrary& lib) {
  for (const auto& step : steps) {
    const StructuringElement& se = lib.at(step.se_id);
    for (int i = 0; i < step.count; ++i) {
      switch (step.op) {
        case Step::Op::Dilation: band = dilate(band, se); break;
        case Step::Op::Erosion: band = erode(band, se); break;
        case Step::Op::HitOrMiss: band = hit_or_miss(band, se); break;
      }
    }
  }
  return band;
}

BinaryBand color_class_band(const Image& img, int band_id) {
  BinaryBand band(img.width, img.height);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      const int v = img.at(r, c);
      if ((band_id == 1 && (v == 1 || v == 3)) || (band_id == 2 && (v == 2 || v == 3)))
        band.set(r, c, true);
    }
  return band;
}

Image run_program(const MorphProgram& program, const Image& img, const SELibrary& lib) {
  static const std::vector<Step> kNoSteps;
  const BandPipeline* p1 = program.pipeline(1);
  const BandPipeline* p2 = program.pipeline(2);
  const std::vector<Step>& steps1 = p1 ? p1->steps : kNoSteps;
  const std::vector<Step>& steps2 = p2 ? p2->steps : kNoSteps;

  if (program.split_se) {
    const Image split = hit_or_miss_colored(img, lib.at(*program.split_se));
    BinaryBand band1 = extract_band(split, 1);
    BinaryBand band2 = extract_band(split, 2);
    band1 = run_pipeline(steps1, std::move(band1), lib);
    band2 = run_pipeline(steps2, std::move(band2), lib);
    return apply_color_rule(band1, band2, *program.color_rule, img.num_colors);
  }
  if (program.color_rule) {
    BinaryBand band1 = run_pipeline(steps1, color_class_band(img, 1), lib);
    BinaryBand band2 = run_pipeline(steps2, color_class_band(img, 2), lib);
    return apply_color_rule(band1, band2, *program.color_rule, img.num_colors);
  }
  return indicator_image(run_pipeline(steps1, foreground_band(img), lib), img.num_colors);
}

MorphProgram fold_iterations(const MorphProgram& program) {
  MorphProgram out = program;
  for (auto& p : out.pipelines) {
    std::vector<Step> folded;
    for (const auto& step : p.steps) {
      if (!folded.empty() && folded.back().op == step.op && folded.back().se_id == step.se_id)
        folded.back().count += step.count;
      else
        folded.push_back(step);
    }
    p.steps = std::move(folded);
  }
  return out;
}

MorphProgram unfold_iterations(const MorphProgram& program) {
  MorphProgram out = program;
  for (auto& p : out.pipelines) {
    std::vector<Step> flat;
    for (const auto& step : p.steps)
      for (int i = 0; i < step.count; ++i) flat.push_back(Step{step.op, step.se_id, 1});
    p.steps = std::move(flat);
  }
  return out;
}

int program_size(const MorphProgram& program) {
  int n = program.split_se ? 1 : 0;
  for (const auto& p : program.pipelines)
    for (const auto& step : p.steps) n += step.count;
  return n;
}

}  // namespace iparc
