#include <doctest.h>

#include <nlohmann/json.hpp>

#include "catdesign/cif.hpp"
#include "catdesign/pvcp.hpp"
#include "support.hpp"

using namespace catdesign;
using fixtures::cubic;
using fixtures::kMinimalCif;
using fixtures::replace_line;
using fixtures::site;

namespace {

const PhysConfig kPhys{};
const RewardWeights kWeights{};
const auto& kRadii = CovalentRadiusTable::standard();

std::string without_space_group(std::string text) {
  text = replace_line(text, "_symmetry_space_group_name_H-M", "");
  return replace_line(text, "_symmetry_Int_Tables_number", "");
}

// Two Cu at distance d along x in a cubic cell of edge a.
Structure cu_pair(double d, double a = 6.0) {
  return cubic(a, {site("Cu1", "Cu", 0, 0, 0), site("Cu2", "Cu", d / a, 0, 0)});
}

}  // namespace

TEST_CASE("default weights") {
  CHECK(kWeights.comp == 0.6);
  CHECK(kWeights.parse == 0.2);
  CHECK(kWeights.valid == 0.1);
  CHECK(kWeights.phys == 0.1);
  CHECK_NOTHROW(kWeights.validate());
  CHECK_THROWS_AS((RewardWeights{0.5, 0.2, 0.1, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((RewardWeights{1.1, -0.1, 0.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PhysConfig{0.8, 0.75, 3, 200}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PhysConfig{0.5, 0.75, 300, 200}.validate()), std::invalid_argument);
}

TEST_CASE("score_parse") {
  CHECK(score_parse(parse_cif(kMinimalCif)) == 1.0);
  CHECK(score_parse(parse_cif(replace_line(kMinimalCif, "_cell_length_b", ""))) == 0.0);
  std::string dup = kMinimalCif;
  dup += "Cu1 Cu 0.5 0.5 0.5\n";
  const auto o = parse_cif(dup);
  REQUIRE(o.defects.size() == 1);
  CHECK(o.defects[0].code == DefectCode::duplicate_label);
  CHECK(score_parse(o) == 1.0);
}

TEST_CASE("score_valid") {
  CHECK(score_valid(parse_cif(kMinimalCif)) == 1.0);
  CHECK(score_valid(parse_cif(without_space_group(kMinimalCif))) == doctest::Approx(1.0 - 1.0 / 6).epsilon(1e-15));
  CHECK(score_valid(parse_cif("not a cif")) == 0.0);
  std::string dup = std::string(kMinimalCif) + "Cu1 Cu 0.5 0.5 0.5\n";
  CHECK(score_valid(parse_cif(dup)) == doctest::Approx(5.0 / 6));
  CHECK(score_valid(parse_cif(replace_line(kMinimalCif, "Cu1 Cu", "Cu1 Cu 1.7 0 0\n"))) == doctest::Approx(5.0 / 6));
  CHECK(score_valid(parse_cif(replace_line(kMinimalCif, "Cu1 Cu", "Cu1 Cu -0.5 0 0\n"))) == 1.0);
  std::vector<std::string> diags;
  score_valid(parse_cif(without_space_group(kMinimalCif)), &diags);
  CHECK(diags.size() == 1);
}

TEST_CASE("score_composition") {
  const CompositionVector cu4o{{"Cu", 4}, {"O", 1}};
  CHECK(score_composition(cu4o, cu4o) == 1.0);
  CHECK(score_composition(cu4o, {{"Cu", 3}, {"O", 1}}) == doctest::Approx(1.0 - 1.0 / 9).epsilon(1e-15));
  CHECK(score_composition({{"Cu", 4}}, {{"Pt", 4}}) == 0.0);
  CHECK_THROWS_AS(score_composition({}, cu4o), std::invalid_argument);
  CHECK_THROWS_AS(score_composition({{"Cu", -1}}, cu4o), std::invalid_argument);

  Rng rng(1);
  const char* els[] = {"Cu", "O", "H", "Pt"};
  for (int trial = 0; trial < 500; ++trial) {
    CompositionVector a, b;
    for (const char* el : els) {
      if (rng.bernoulli(0.6)) a[el] = 1 + static_cast<int>(rng.index(5));
      if (rng.bernoulli(0.6)) b[el] = 1 + static_cast<int>(rng.index(5));
    }
    if (a.empty() || b.empty()) continue;
    const double ab = score_composition(a, b);
    CHECK(ab == score_composition(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK((ab == 1.0) == (a == b));
  }
}

TEST_CASE("score_physical") {
  // 2.4 A Cu-Cu, full credit begins at 0.75 * 2.64 = 1.98 A.
  CHECK(score_physical(cu_pair(2.4, 4.8), kRadii, kPhys) == 1.0);
  CHECK(score_physical(cu_pair(0.0), kRadii, kPhys) == 0.0);
  CHECK(score_physical(cu_pair(0.5 * 2.64), kRadii, kPhys) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(score_physical(cu_pair(0.75 * 2.64), kRadii, kPhys) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(score_physical(cu_pair(0.625 * 2.64), kRadii, kPhys) == doctest::Approx(0.5).epsilon(1e-12));

  // One Cu, volume per atom swept through the upper decade.
  auto single = [](double vpa) { return cubic(std::cbrt(vpa), {site("Cu1", "Cu", 0, 0, 0)}); };
  CHECK(score_physical(single(150), kRadii, kPhys) == 1.0);
  CHECK(score_physical(single(std::sqrt(200.0 * 2000.0)), kRadii, kPhys) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(score_physical(single(2000), kRadii, kPhys) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(score_physical(single(5000), kRadii, kPhys) == 0.0);

  const Lattice flat = Lattice::from_matrix((Eigen::Matrix3d() << 1, 0, 0, 0, 1, 0, 0, 0, 1e-9).finished());
  std::vector<std::string> diags;
  CHECK(score_physical(Structure(flat, {site("Cu1", "Cu", 0, 0, 0)}), kRadii, kPhys, &diags) == 0.0);
  CHECK_FALSE(diags.empty());
}

TEST_CASE("pvcp examples") {
  SUBCASE("perfect candidate") {
    const auto r = pvcp(kMinimalCif, {{"Cu", 1}}, kWeights, kPhys);
    CHECK(r.total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_FALSE(r.flags.any());
  }
  SUBCASE("unparseable") {
    const auto r = pvcp("data_x\n_cell_length_a", {{"Cu", 1}}, kWeights, kPhys);
    CHECK(r.total == 0.0);
    CHECK(r.flags.parse_fail);
    CHECK(r.flags.names() == std::vector<std::string>{"PF"});
    CHECK(r.s_valid == 0.0);
    CHECK(r.s_comp == 0.0);
    CHECK(r.s_phys == 0.0);
    CHECK_FALSE(r.diagnostics.empty());
  }
  SUBCASE("worked composite") {
    const Structure overlap = cubic(4, {site("Cu1", "Cu", 0.2, 0.2, 0.2), site("Cu2", "Cu", 0.2, 0.2, 0.2)});
    const std::string text = without_space_group(serialize_cif(overlap));
    const auto r = pvcp(text, {{"Cu", 2}}, kWeights, kPhys);
    CHECK(r.s_parse == 1.0);
    CHECK(r.s_comp == 1.0);
    CHECK(r.s_valid == doctest::Approx(5.0 / 6).epsilon(1e-15));
    CHECK(r.s_phys == 0.0);
    CHECK(std::abs(r.total - (0.6 + 0.2 + 0.1 * 5.0 / 6)) < 1e-12);
    CHECK(r.total == doctest::Approx(0.8833).epsilon(1e-4));
    CHECK(r.flags.names() == std::vector<std::string>{"VF", "PV"});
  }
  SUBCASE("contract violations propagate") {
    CHECK_THROWS_AS(pvcp(kMinimalCif, {}, kWeights, kPhys), std::invalid_argument);
    CHECK_THROWS_AS(pvcp(kMinimalCif, {{"Cu", 1}}, RewardWeights{1, 1, 0, 0}, kPhys), std::invalid_argument);
  }
}

TEST_CASE("pvcp total is the weighted sum and respects linearity") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Structure s = fixtures::random_structure(rng, 5);
    std::string text = serialize_cif(s);
    if (trial % 3 == 0) text = without_space_group(text);
    const CompositionVector target{{"Cu", 1 + static_cast<int>(rng.index(3))}, {"O", 1}};
    const auto r = pvcp(text, target, kWeights, kPhys);
    CHECK(std::abs(r.total - (0.6 * r.s_comp + 0.2 * r.s_parse + 0.1 * r.s_valid + 0.1 * r.s_phys)) < 1e-12);
    // Double the physical weight, renormalize.
    const RewardWeights w2{0.6 / 1.1, 0.2 / 1.1, 0.1 / 1.1, 0.2 / 1.1};
    const auto r2 = pvcp(text, target, w2, kPhys);
    CHECK(std::abs(r2.total - (r.total + 0.1 * r.s_phys) / 1.1) < 1e-12);
    CHECK(r.flags.valid_fail == (r.s_valid < 1));
    CHECK(r.flags.composition_mismatch == (r.s_comp < 1));
    CHECK(r.flags.physical_violation == (r.s_phys < 1));
  }
}

TEST_CASE("worsening one sub-score never raises the total") {
  const std::string good = kMinimalCif;
  const auto base = pvcp(good, {{"Cu", 1}}, kWeights, kPhys);
  CHECK(pvcp(without_space_group(good), {{"Cu", 1}}, kWeights, kPhys).total <= base.total);
  CHECK(pvcp(good, {{"Cu", 2}}, kWeights, kPhys).total <= base.total);
  CHECK(pvcp(replace_line(good, "_cell_length_a", "_cell_length_a 40\n"), {{"Cu", 1}}, kWeights, kPhys).total <=
        base.total);
}

TEST_CASE("scores stay in [0, 1] on noise") {
  Rng rng(77);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text = kMinimalCif;
    for (int k = 0; k < 4; ++k) text[rng.index(text.size())] = static_cast<char>(rng.index(256));
    const auto r = pvcp(text, {{"Cu", 1}}, kWeights, kPhys);
    for (double v : {r.s_parse, r.s_valid, r.s_comp, r.s_phys, r.total}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(r.flags.parse_fail == (r.s_parse == 0.0));
  }
}

TEST_CASE("corpus failure rates") {
  std::vector<RewardBreakdown> reports(4);
  reports[0].flags.parse_fail = true;
  reports[1].flags.valid_fail = true;
  reports[2].flags.composition_mismatch = true;
  reports[3].flags.physical_violation = true;
  const FailureRates r = corpus_failure_rates(reports);
  CHECK(r.pf == 25.0);
  CHECK(r.vf == 25.0);
  CHECK(r.cm == 25.0);
  CHECK(r.pv == 25.0);
  CHECK(r.corpus_size == 4);
  CHECK(r.counts == std::array<std::size_t, 4>{1, 1, 1, 1});

  const FailureRates clean = corpus_failure_rates(std::vector<RewardBreakdown>(3));
  CHECK(clean.pf + clean.vf + clean.cm + clean.pv == 0.0);
  CHECK_THROWS_AS(corpus_failure_rates({}), std::invalid_argument);

  const auto j = to_json(r);
  CHECK(j["PF"] == 25.0);
  CHECK(j["corpus_size"] == 4);
}

TEST_CASE("report JSON shape") {
  const auto j = to_json(pvcp(kMinimalCif, {{"Cu", 2}}, kWeights, kPhys), "cand-1");
  for (const char* key : {"candidate_id", "s_parse", "s_valid", "s_comp", "s_phys", "total", "flags", "diagnostics"})
    CHECK(j.contains(key));
  CHECK(j["candidate_id"] == "cand-1");
  CHECK(j["flags"] == nlohmann::json::array({"CM"}));
}
