#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "iparc/errors.hpp"
#include "iparc/morphology.hpp"
#include "iparc/rng.hpp"
#include "oracle.hpp"

using namespace iparc;

namespace {

BinaryBand band_from(const std::vector<std::string>& rows) {
  BinaryBand band(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int r = 0; r < band.height(); ++r)
    for (int c = 0; c < band.width(); ++c)
      if (rows[r][c] == '#') band.set(r, c, true);
  return band;
}

}  // namespace

TEST_CASE("dilation of an empty band is empty") {
  const SELibrary lib = default_se_library();
  const BinaryBand empty(5, 5);
  for (const auto& se : lib) CHECK(dilate(empty, se).none());
}

TEST_CASE("dilating a single centre pixel with the full 3x3 SE gives a centred block") {
  const BinaryBand single = band_from({".....", ".....", "..#..", ".....", "....."});
  const auto se = StructuringElement::from_strings("B", {"###", "###", "###"});
  const BinaryBand got = dilate(single, se);
  CHECK(got == oracle::dilate_ref(single, se));
  CHECK(got == band_from({".....", ".###.", ".###.", ".###.", "....."}));
}

TEST_CASE("dilation with an FG-origin SE fixes the all-foreground band") {
  const BinaryBand full(6, 4, true);
  for (const auto& se : default_se_library()) CHECK(dilate(full, se) == full);
}

TEST_CASE("erosion of an empty band is empty") {
  const BinaryBand empty(4, 7);
  for (const auto& se : default_se_library()) CHECK(erode(empty, se).none());
}

TEST_CASE("eroding a 3x3 block with the full 3x3 SE leaves its centre") {
  const BinaryBand block = band_from({".....", ".###.", ".###.", ".###.", "....."});
  const auto se = StructuringElement::from_strings("B", {"###", "###", "###"});
  const BinaryBand got = erode(block, se);
  CHECK(got == oracle::erode_ref(block, se));
  CHECK(got == band_from({".....", ".....", "..#..", ".....", "....."}));
}

TEST_CASE("closing contains the original away from the border") {
  const BinaryBand single = band_from({".....", ".....", "..#..", ".....", "....."});
  for (const auto& se : default_se_library()) CHECK(erode(dilate(single, se), se).covers(single));
}

TEST_CASE("hit-or-miss basics") {
  const auto se8 = default_se_library().at("SE8");
  CHECK(hit_or_miss(BinaryBand(5, 5), se8).none());

  const auto dot = StructuringElement::from_strings("dot", {"#"});
  const BinaryBand single = band_from({"....", ".#..", "....", "...."});
  CHECK(hit_or_miss(single, dot) == single);
}

TEST_CASE("hit-or-miss equals exhaustive template matching") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const BinaryBand band = oracle::random_band(rng, 6, 6);
    const auto se = oracle::random_se(rng, true);
    CHECK(hit_or_miss(band, se) == oracle::hit_or_miss_ref(band, se));
  }
}

TEST_CASE("operators match the brute-force definitions on random cases") {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int w = 1 + rng.below_int(8);
    const int h = 1 + rng.below_int(8);
    const BinaryBand band = oracle::random_band(rng, w, h);
    const auto se = oracle::random_se(rng, false);
    CHECK(dilate(band, se) == oracle::dilate_ref(band, se));
    CHECK(erode(band, se) == oracle::erode_ref(band, se));
  }
}

TEST_CASE("extensivity and anti-extensivity for FG-origin SEs") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryBand band = oracle::random_band(rng, 7, 7);
    const auto se = oracle::random_se(rng, false, true);
    CHECK(dilate(band, se).covers(band));
    CHECK(band.covers(erode(band, se)));
  }
}

TEST_CASE("monotonicity: subset inputs give subset outputs") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryBand small = oracle::random_band(rng, 7, 6, 0.3);
    BinaryBand big = small;
    big |= oracle::random_band(rng, 7, 6, 0.2);
    const auto se = oracle::random_se(rng, false);
    CHECK(dilate(big, se).covers(dilate(small, se)));
    CHECK(erode(big, se).covers(erode(small, se)));
  }
}

TEST_CASE("duality on a padded band") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    // Pad by the SE radius so no placement reads outside the grid within the
    // interior, where complement(dilate(b)) must equal erode(complement(b))
    // with the reflected SE.
    const int w = 9, h = 9, pad = 2;
    BinaryBand band(w, h);
    for (int r = pad; r < h - pad; ++r)
      for (int c = pad; c < w - pad; ++c)
        if (rng.chance(0.4)) band.set(r, c, true);
    const auto se = oracle::random_se(rng, false);

    const BinaryBand lhs = dilate(band, se).complement();
    const BinaryBand rhs = erode(band.complement(), se.reflected());
    for (int r = pad; r < h - pad; ++r)
      for (int c = pad; c < w - pad; ++c) CHECK(lhs.at(r, c) == rhs.at(r, c));
  }
}

TEST_CASE("hit_or_miss_colored recolours matches to 2") {
  const SELibrary lib = default_se_library();
  const auto& se8 = lib.at("SE8");

  Image empty(5, 5, 3);
  CHECK(hit_or_miss_colored(empty, se8).cells ==
        std::vector<int>(25, 0));

  // Foreground exactly equal to the SE8 template: corners and centre.
  Image img(5, 5, 3);
  for (auto [r, c] : {std::pair{1, 1}, {1, 3}, {2, 2}, {3, 1}, {3, 3}}) img.at(r, c) = 1;
  const Image split = hit_or_miss_colored(img, se8);
  CHECK(split.at(2, 2) == 2);
  int ones = 0, twos = 0;
  for (int v : split.cells) {
    ones += v == 1;
    twos += v == 2;
  }
  CHECK(twos == 1);
  CHECK(ones == 4);

  // Once the matched centre is removed, re-splitting band 1 yields no new
  // match cells.
  const BinaryBand band1 = extract_band(split, 1);
  CHECK(hit_or_miss(band1, se8).none());
  CHECK(extract_band(split, 2) == hit_or_miss(foreground_band(img), se8));
}

TEST_CASE("extract_band partitions the image") {
  CHECK(extract_band(Image(4, 4, 3), 1).none());
  CHECK_THROWS_AS(extract_band(Image(4, 4, 3), 3), std::invalid_argument);
  CHECK_THROWS_AS(extract_band(Image(4, 4, 3), -1), std::invalid_argument);

  Rng rng(23);
  Image img(6, 5, 4);
  for (auto& cell : img.cells) cell = rng.below_int(4);
  std::vector<int> coverage(img.cells.size(), 0);
  for (int colour = 0; colour < 4; ++colour) {
    const BinaryBand band = extract_band(img, colour);
    for (int r = 0; r < img.height; ++r)
      for (int c = 0; c < img.width; ++c)
        if (band.at(r, c)) coverage[static_cast<size_t>(r) * img.width + c]++;
  }
  CHECK(std::all_of(coverage.begin(), coverage.end(), [](int n) { return n == 1; }));
}

TEST_CASE("colour rules combine bands") {
  const ColorRule fig_rule({{0, 0, 0}, {0, 1, 2}, {1, 0, 1}, {1, 1, 2}});
  BinaryBand b1 = band_from({"#.", ".."});
  BinaryBand b2 = band_from({"..", ".#"});
  const Image out = apply_color_rule(b1, b2, fig_rule, 3);
  CHECK(out.at(0, 0) == 1);  // band-1 only pixel takes colour 1
  CHECK(out.at(1, 1) == 2);
  CHECK(out.at(0, 1) == 0);

  const ColorRule identity({{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}});
  BinaryBand merged = b1;
  merged |= b2;
  CHECK(apply_color_rule(b1, b2, identity, 2) == indicator_image(merged, 2));

  CHECK(apply_color_rule(b1, b2, ColorRule::constant_zero(), 2).cells == std::vector<int>(4, 0));

  const ColorRule partial({{0, 0, 0}, {1, 0, 1}});
  CHECK_THROWS_AS(apply_color_rule(b1, b2, partial, 3), IncompleteRuleError);
}

TEST_CASE("apply_color_rule is pixelwise: permuting pixels commutes") {
  Rng rng(31);
  const ColorRule rule({{0, 0, 0}, {0, 1, 2}, {1, 0, 1}, {1, 1, 2}});
  const int w = 6, h = 4;
  const BinaryBand b1 = oracle::random_band(rng, w, h);
  const BinaryBand b2 = oracle::random_band(rng, w, h);

  std::vector<int> perm(static_cast<size_t>(w) * h);
  std::iota(perm.begin(), perm.end(), 0);
  for (size_t i = perm.size() - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.below(i + 1)]);

  auto permute_band = [&](const BinaryBand& band) {
    BinaryBand out(w, h);
    for (int i = 0; i < w * h; ++i)
      if (band.at(i / w, i % w)) out.set(perm[i] / w, perm[i] % w, true);
    return out;
  };
  const Image direct = apply_color_rule(b1, b2, rule, 3);
  const Image permuted = apply_color_rule(permute_band(b1), permute_band(b2), rule, 3);
  for (int i = 0; i < w * h; ++i)
    CHECK(permuted.at(perm[i] / w, perm[i] % w) == direct.at(i / w, i % w));
}

TEST_CASE("default SE library") {
  const SELibrary lib = default_se_library();
  CHECK(lib.size() == 8);
  CHECK(lib.ids() == std::vector<std::string>{"SE1", "SE2", "SE3", "SE4", "SE5", "SE6", "SE7",
                                              "SE8"});
  CHECK(lib.all_origins_fg());
  CHECK(default_se_library().ids() == lib.ids());

  CHECK(lib.at("SE6").fg_offsets().size() == 3);   // horizontal line
  CHECK(lib.at("SE7").fg_offsets().size() == 3);   // vertical line
  CHECK(lib.at("SE8").bg_offsets().size() == 4);   // hit-or-miss template
  CHECK_THROWS_AS(lib.at("SE99"), UnresolvedSeError);
}

TEST_CASE("structuring element validation") {
  CHECK_THROWS_AS(StructuringElement::from_strings("bad", {"##", "##"}), std::invalid_argument);
  CHECK_THROWS_AS(StructuringElement::from_strings("bad", {"..."}), std::invalid_argument);
  CHECK_THROWS_AS(StructuringElement::from_strings("bad", {"#z#"}), std::invalid_argument);
  CHECK_THROWS_AS(StructuringElement::from_strings("bad", {"#######"}), std::invalid_argument);
  CHECK_THROWS_AS(StructuringElement::from_strings("bad", {"###"}, std::make_pair(0, 5)),
                  std::invalid_argument);
  const auto custom = StructuringElement::from_strings("o", {"#..", ".#.", "..#"},
                                                       std::make_pair(0, 0));
  CHECK(custom.origin_is_fg());
  CHECK(custom.fg_offsets().size() == 3);
}
