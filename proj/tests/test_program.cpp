#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iparc/errors.hpp"
#include "iparc/program.hpp"
#include "iparc/program_text.hpp"
#include "iparc/rng.hpp"
#include "oracle.hpp"

using namespace iparc;

namespace {

// The example solution listing, with its original typography (en-dashes,
// multiplication sign, rule list on its own line).
const std::string kExampleListing =
    "Hit-Or-Miss SE8\n"
    "Band 1 \xE2\x80\x93 Iterate 2\xC3\x97 Dilation SE6\n"
    "Band 1 \xE2\x80\x93 Iterate 2\xC3\x97 Erosion SE6\n"
    "Band 2 \xE2\x80\x93 Dilation SE8\n"
    "Band 2 \xE2\x80\x93 Dilation SE7\n"
    "Band 2 \xE2\x80\x93 Dilation SE5\n"
    "Band 2 \xE2\x80\x93 Dilation SE7\n"
    "Band 2 \xE2\x80\x93 Erosion SE7\n"
    "Band 2 \xE2\x80\x93 Erosion SE5\n"
    "Band 2 \xE2\x80\x93 Erosion SE7\n"
    "Colour Rule:\n"
    "[[0, 0, 0], [0, 1, 2], [1, 0, 1], [1, 1, 2]]\n";

MorphProgram example_program() {
  MorphProgram p;
  p.split_se = "SE8";
  p.pipelines.push_back(BandPipeline{1,
                                     {Step{Step::Op::Dilation, "SE6", 2},
                                      Step{Step::Op::Erosion, "SE6", 2}}});
  p.pipelines.push_back(BandPipeline{2,
                                     {Step{Step::Op::Dilation, "SE8", 1},
                                      Step{Step::Op::Dilation, "SE7", 1},
                                      Step{Step::Op::Dilation, "SE5", 1},
                                      Step{Step::Op::Dilation, "SE7", 1},
                                      Step{Step::Op::Erosion, "SE7", 1},
                                      Step{Step::Op::Erosion, "SE5", 1},
                                      Step{Step::Op::Erosion, "SE7", 1}}});
  p.color_rule = ColorRule({{0, 0, 0}, {0, 1, 2}, {1, 0, 1}, {1, 1, 2}});
  return p;
}

Image random_image(Rng& rng, int w, int h, int k, double density = 0.35) {
  Image img(w, h, k);
  for (auto& cell : img.cells)
    if (rng.chance(density)) cell = 1 + rng.below_int(k - 1);
  return img;
}

// Random valid normalized programs for round-trip checks.
MorphProgram random_program(Rng& rng) {
  const std::vector<std::string> ids = {"SE1", "SE2", "SE3", "SE4",
                                        "SE5", "SE6", "SE7", "SE8"};
  auto random_steps = [&](int max_len) {
    std::vector<Step> steps;
    const int n = rng.below_int(max_len + 1);
    for (int i = 0; i < n; ++i) {
      const int op = rng.below_int(3);
      steps.push_back(Step{op == 0   ? Step::Op::Dilation
                           : op == 1 ? Step::Op::Erosion
                                     : Step::Op::HitOrMiss,
                           ids[rng.below(ids.size())], 1 + rng.below_int(4)});
    }
    return steps;
  };

  MorphProgram p;
  const int shape = rng.below_int(3);
  if (shape == 0) {
    p.pipelines.push_back(BandPipeline{1, random_steps(6)});
  } else {
    if (shape == 2) p.split_se = ids[rng.below(ids.size())];
    p.pipelines.push_back(BandPipeline{1, random_steps(4)});
    p.pipelines.push_back(BandPipeline{2, random_steps(4)});
    ColorRule rule;
    for (int b1 = 0; b1 <= 1; ++b1)
      for (int b2 = 0; b2 <= 1; ++b2)
        if (rng.chance(0.8)) rule.set(b1, b2, rng.below_int(6));
    p.color_rule = rule;
  }
  return p.normalized();
}

}  // namespace

TEST_CASE("the example listing parses to the expected AST") {
  const MorphProgram parsed = parse_program(kExampleListing);
  CHECK(parsed == example_program().normalized());
  CHECK(parsed.split_se == "SE8");
  REQUIRE(parsed.pipelines.size() == 2);
  CHECK(parsed.pipelines[0].steps.size() == 2);
  CHECK(parsed.pipelines[0].steps[0].count == 2);
  CHECK(parsed.pipelines[1].steps.size() == 7);
  REQUIRE(parsed.color_rule.has_value());
  CHECK(parsed.color_rule->lookup(1, 0) == 1);
  CHECK(parsed.color_rule->lookup(1, 1) == 2);
}

TEST_CASE("printing is canonical and re-parses") {
  const MorphProgram p = example_program();
  const std::string text = print_program(p);
  CHECK(text ==
        "Hit-Or-Miss SE8\n"
        "Band 1 - Iterate 2\xC3\x97 Dilation SE6\n"
        "Band 1 - Iterate 2\xC3\x97 Erosion SE6\n"
        "Band 2 - Dilation SE8\n"
        "Band 2 - Dilation SE7\n"
        "Band 2 - Dilation SE5\n"
        "Band 2 - Dilation SE7\n"
        "Band 2 - Erosion SE7\n"
        "Band 2 - Erosion SE5\n"
        "Band 2 - Erosion SE7\n"
        "Colour rule: [[0,0,0],[0,1,2],[1,0,1],[1,1,2]]\n");
  CHECK(parse_program(text) == p.normalized());
}

TEST_CASE("empty text is the empty program and prints to empty text") {
  const MorphProgram p = parse_program("");
  CHECK(p.empty());
  CHECK(print_program(p).empty());
}

TEST_CASE("parser accepts tolerant spellings") {
  CHECK(parse_program("Band 1 - Iterate 2 times Dilation SE6") ==
        parse_program("Band 1 - Iterate 2x Dilation SE6"));
  CHECK(parse_program("band 1 - dilation SE6") ==
        parse_program("Band 1 - Dilation SE6"));
  CHECK(parse_program("Color rule: [[0,0,0],[0,1,2],[1,0,1],[1,1,2]]") ==
        parse_program("Colour rule: [[0,0,0],[0,1,2],[1,0,1],[1,1,2]]"));
  // Iterate 1x collapses to a plain step.
  CHECK(parse_program("Band 1 - Iterate 1x Erosion SE2") ==
        parse_program("Band 1 - Erosion SE2"));
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse_program("Band 1 - Frobnicate SE1");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("Dilation, Erosion or Hit-Or-Miss") != std::string::npos);
  }
  try {
    parse_program("Band 1 - Dilation SE6\nBand x - Erosion SE1");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("grammar order and rule validity are enforced") {
  CHECK_THROWS_AS(parse_program("Band 1 - Dilation SE6\nHit-Or-Miss SE8"), ParseError);
  CHECK_THROWS_AS(
      parse_program("Colour rule: [[0,0,0]]\nColour rule: [[0,0,0]]"), ParseError);
  CHECK_THROWS_AS(parse_program("Colour rule: [[0,0,0]]\nBand 1 - Dilation SE6"), ParseError);
  CHECK_THROWS_AS(parse_program("Colour rule: [[2,0,0]]"), ParseError);      // band bit > 1
  CHECK_THROWS_AS(parse_program("Colour rule: [[0,0,999]]"), ParseError);    // colour out of range
  CHECK_THROWS_AS(parse_program("Colour rule: [[0,0,0],[0,0,1]]"), ParseError);  // duplicate row
  CHECK_THROWS_AS(parse_program("Colour rule: [[0,0,0]"), ParseError);       // unterminated
  CHECK_THROWS_AS(parse_program("Band 1 - Dilation"), ParseError);           // missing SE id
  CHECK_THROWS_AS(parse_program("Hit-Or-Miss SE8"), ParseError);             // split without rule
}

TEST_CASE("round trip: parse(print(p)) == p for 500 random programs") {
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const MorphProgram p = random_program(rng);
    const MorphProgram back = parse_program(print_program(p));
    CHECK(back == p);
  }
}

TEST_CASE("empty program output is the foreground indicator") {
  Rng rng(5);
  const SELibrary lib = default_se_library();
  const MorphProgram empty;
  for (int trial = 0; trial < 20; ++trial) {
    const Image img = random_image(rng, 7, 5, 3);
    const Image out = run_program(empty, img, lib);
    CHECK(out == indicator_image(foreground_band(img), img.num_colors));
  }
}

TEST_CASE("interpreter reports unresolved SEs and incomplete rules") {
  const SELibrary lib = default_se_library();
  MorphProgram p;
  p.pipelines.push_back(BandPipeline{1, {Step{Step::Op::Dilation, "SE42", 1}}});
  CHECK_THROWS_AS(run_program(p, Image(3, 3, 2), lib), UnresolvedSeError);

  MorphProgram q;
  q.color_rule = ColorRule({{0, 0, 0}});
  Image img(3, 3, 3);
  img.at(1, 1) = 1;
  CHECK_THROWS_AS(run_program(q, img, lib), IncompleteRuleError);
}

TEST_CASE("split programs feed the rule with the match mask and the remaining foreground") {
  Rng rng(123);
  const SELibrary lib = default_se_library();
  MorphProgram p;
  p.split_se = "SE8";
  p.color_rule = ColorRule({{0, 0, 0}, {0, 1, 2}, {1, 0, 1}, {1, 1, 3}});
  for (int trial = 0; trial < 50; ++trial) {
    const Image img = random_image(rng, 9, 9, 2, 0.45);
    const BinaryBand fg = foreground_band(img);
    const BinaryBand mask = hit_or_miss(fg, lib.at("SE8"));
    const Image out = run_program(p, img, lib);
    for (int r = 0; r < img.height; ++r)
      for (int c = 0; c < img.width; ++c) {
        const int expected = mask.at(r, c) ? 2 : fg.at(r, c) ? 1 : 0;
        CHECK(out.at(r, c) == expected);
      }
  }
}

TEST_CASE("iteration nodes mean repeated application") {
  Rng rng(77);
  const SELibrary lib = default_se_library();
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryBand band = oracle::random_band(rng, 8, 8);
    const BinaryBand folded =
        run_pipeline({Step{Step::Op::Dilation, "SE6", 2}}, band, lib);
    const BinaryBand flat = run_pipeline(
        {Step{Step::Op::Dilation, "SE6", 1}, Step{Step::Op::Dilation, "SE6", 1}}, band, lib);
    CHECK(folded == flat);
  }
}

TEST_CASE("fold and unfold") {
  MorphProgram p;
  p.pipelines.push_back(BandPipeline{
      1, {Step{Step::Op::Dilation, "SE6", 1}, Step{Step::Op::Dilation, "SE6", 1}}});
  const MorphProgram folded = fold_iterations(p);
  CHECK(folded.pipelines[0].steps ==
        std::vector<Step>{Step{Step::Op::Dilation, "SE6", 2}});

  MorphProgram q;
  q.pipelines.push_back(BandPipeline{
      1, {Step{Step::Op::Dilation, "SE6", 1}, Step{Step::Op::Erosion, "SE6", 1}}});
  CHECK(fold_iterations(q) == q);

  CHECK(unfold_iterations(folded) == p);
  CHECK(unfold_iterations(q) == q);
}

TEST_CASE("fold/unfold preserve semantics and sizes") {
  Rng rng(31337);
  const SELibrary lib = default_se_library();
  for (int trial = 0; trial < 200; ++trial) {
    MorphProgram p = random_program(rng);
    const MorphProgram folded = fold_iterations(p);
    const MorphProgram unfolded = unfold_iterations(p);
    CHECK(unfold_iterations(folded) == unfold_iterations(unfolded));
    CHECK(program_size(folded) == program_size(p));
    CHECK(program_size(unfolded) == program_size(p));

    const int k = p.color_rule || p.split_se ? 4 : 2;
    const Image img = random_image(rng, 6, 6, k);
    // Programs whose rule misses an occurring combination throw; all three
    // variants must then agree on throwing as well.
    try {
      const Image a = run_program(p, img, lib);
      CHECK(a == run_program(folded, img, lib));
      CHECK(a == run_program(unfolded, img, lib));
    } catch (const IncompleteRuleError&) {
      CHECK_THROWS_AS(run_program(folded, img, lib), IncompleteRuleError);
      CHECK_THROWS_AS(run_program(unfolded, img, lib), IncompleteRuleError);
    }
  }
}

TEST_CASE("program_size counts unfolded primitive applications") {
  CHECK(program_size(MorphProgram{}) == 0);
  CHECK(program_size(example_program()) == 12);  // 1 split + 4 + 7
}
