#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cin/analytic.hpp"
#include "cin/equilibrium.hpp"

using namespace cin;

namespace {

const BenefitFunction kLn = BenefitFunction::natural_log_one_plus();

GameConfig bits_game(double c) {
  return GameConfig(family_independent(std::vector<double>{1, 1}), kLn, CostModel::homogeneous(c));
}

}  // namespace

TEST_CASE("homogeneous thresholds") {
  const auto t = thresholds_homogeneous(family_example1(5, 4, 4, 0), kLn);
  CHECK(t.c_l == doctest::Approx(0.44183275227903923).epsilon(1e-12));
  CHECK(t.c_u == doctest::Approx(1.0296194171811581).epsilon(1e-12));

  const auto sharp = thresholds_homogeneous(family_example1(5, 4, 4, 4), kLn);
  CHECK(sharp.c_l == doctest::Approx(std::log(10.0 / 5.0)));
  CHECK(sharp.c_u == doctest::Approx(sharp.c_l));

  const auto same = thresholds_homogeneous(family_max_correlated(std::vector<double>{1, 1}), kLn);
  CHECK(same.c_l == 0.0);
  CHECK(same.c_u == 0.0);
}

TEST_CASE("region boundaries") {
  const Thresholds t{0.4, 1.0};
  CHECK(region_homogeneous(t, 0.4) == Region::kConnected);
  CHECK(region_homogeneous(t, 0.7) == Region::kMixed);
  CHECK(region_homogeneous(t, 1.0) == Region::kIsolated);
  CHECK(region_label(Region::kMixed) == "K_M");
}

TEST_CASE("recipient-dependent regions") {
  const auto ev = family_example1(5, 4, 4, 0);
  CHECK(region_heterogeneous(ev, kLn, CostModel::recipient_dependent({0.1, 0.2, 0.3})) == Region::kConnected);
  CHECK(region_heterogeneous(ev, kLn, CostModel::recipient_dependent({2, 2, 2})) == Region::kIsolated);
  CHECK(region_heterogeneous(ev, kLn, CostModel::recipient_dependent({0.1, 0.2, 0.9})) == Region::kMixed);
  // Only agent 1's inequality is tested under the argmin reading.
  CHECK(region_heterogeneous(ev, kLn, CostModel::recipient_dependent({0.1, 0.2, 0.9}), KcRule::kArgminAgent) ==
        Region::kConnected);
  CHECK_THROWS(region_heterogeneous(ev, kLn, CostModel::homogeneous(0.1)));
}

TEST_CASE("partitions") {
  CHECK(all_partitions(1).size() == 1);
  CHECK(all_partitions(3).size() == 5);
  CHECK(all_partitions(4).size() == 15);
  CHECK(all_partitions(5).size() == 52);
  for (const auto& p : all_partitions(4)) {
    AgentSet seen = 0;
    for (AgentSet b : p) {
      CHECK((seen & b) == 0);
      seen |= b;
    }
    CHECK(seen == 0b1111);
  }
}

TEST_CASE("component conditions on two bits") {
  CHECK(check_component_structure_ne(bits_game(0.3), {0b11}));
  CHECK_FALSE(check_component_structure_ne(bits_game(0.3), {0b01, 0b10}));
  CHECK(check_component_structure_ne(bits_game(2.0), {0b01, 0b10}));
  CHECK_THROWS(check_component_structure_ne(bits_game(0.3), {0b01}));
  CHECK_THROWS(check_component_structure_ne(bits_game(0.3), {0b11, 0b01}));
}

TEST_CASE("strict shape test") {
  const GameConfig cfg(family_independent(std::vector<double>{5, 4, 4}), kLn, CostModel::homogeneous(0.1));
  LinkProfile star(3);
  star.set_link(0, 1, true);
  star.set_link(0, 2, true);
  CHECK(check_strict_ne_structure(cfg, star));
  CHECK(is_strict_nash(cfg, star));

  LinkProfile line(3);
  line.set_link(0, 1, true);
  line.set_link(1, 2, true);
  CHECK_FALSE(check_strict_ne_structure(cfg, line));

  CHECK_FALSE(check_strict_ne_structure(cfg, LinkProfile(3)));
  CHECK_FALSE(is_nash(cfg, LinkProfile(3)));
}

TEST_CASE("predicted PoA and MIL") {
  const auto ev = family_example1(5, 4, 4, 0);
  const GameConfig connected(ev, kLn, CostModel::homogeneous(0.2));
  CHECK(poa_predict(connected).value == 1.0);
  CHECK_FALSE(poa_predict(connected).is_bound);

  const GameConfig het(ev, kLn, CostModel::recipient_dependent({0.1, 0.2, 0.3}));
  CHECK(poa_predict(het).value == doctest::Approx(1.0404466824351857).epsilon(1e-12));

  const GameConfig mixed(ev, kLn, CostModel::homogeneous(0.75));
  const auto bound = poa_predict(mixed);
  CHECK(bound.is_bound);
  CHECK(bound.value == doctest::Approx(1.580073488520333).epsilon(1e-12));

  CHECK(mil_predict(connected).value == 0.0);
  CHECK(mil_predict(mixed).value == doctest::Approx(9.0));
  const GameConfig mixed2(family_example1(5, 4, 4, 2), kLn, CostModel::homogeneous(0.75));
  REQUIRE(mil_predict(mixed2).region == Region::kMixed);
  CHECK(mil_predict(mixed2).value == doctest::Approx(7.0));

  CHECK_THROWS(poa_predict(GameConfig(ev, kLn, CostModel::general({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}))));
}

TEST_CASE("redundancy raises the connected-region PoA") {
  const std::vector<double> costs{0.1, 0.2, 0.3};
  const std::vector<double> kls{0, 1, 2};
  // Agent 3's inequality ln((14 - kl) / 10) > 0.3 fails for kl > 0.5, so
  // only the argmin reading keeps the whole series in K_C.
  CHECK_THROWS_AS(poa_monotonicity_sweep(5, 4, 4, kLn, costs, kls), std::domain_error);
  const auto series = poa_monotonicity_sweep(5, 4, 4, kLn, costs, kls, KcRule::kArgminAgent);
  REQUIRE(series.size() == 3);
  CHECK(series[0] == doctest::Approx(1.0404466824351857).epsilon(1e-12));
  CHECK(series[1] == doctest::Approx(1.041696502411422).epsilon(1e-12));
  CHECK(series[2] == doctest::Approx(1.0431361725826838).epsilon(1e-12));

  const std::vector<double> flat_kl{1, 1, 1};
  const auto flat = poa_monotonicity_sweep(5, 4, 4, kLn, costs, flat_kl, KcRule::kArgminAgent);
  CHECK(flat[0] == flat[2]);

  const std::vector<double> equal{0.2, 0.2, 0.2};
  for (double v : poa_monotonicity_sweep(5, 4, 4, kLn, equal, kls, KcRule::kArgminAgent)) CHECK(v == doctest::Approx(1.0));

  const std::vector<double> dear{0.1, 0.2, 0.9};
  CHECK_THROWS_AS(poa_monotonicity_sweep(5, 4, 4, kLn, dear, kls), std::domain_error);
}

TEST_CASE("region sweep rows") {
  const std::vector<double> cs{0.0, 0.5, 2.0};
  const std::vector<double> kls{4.0};
  const auto rows = region_sweep(5, 4, 4, kLn, cs, kls);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].region == Region::kConnected);
  for (const auto& r : rows) CHECK(r.region != Region::kMixed);

  const std::vector<double> fine_c{0.3, 0.5, 0.7, 0.9, 1.1, 1.3};
  const std::vector<double> second_kl{0.0, 1.0, 2.0};
  for (double kl : second_kl) {
    const auto t = thresholds_homogeneous(family_example1(7, 4, 2, kl), kLn);
    CHECK(t.c_l < t.c_u);
  }
  std::ostringstream csv;
  write_region_csv(csv, region_sweep(7, 4, 2, kLn, fine_c, second_kl));
  CHECK(csv.str().rfind("c,kl,region,c_l,c_u,poa_or_bound,mil_or_bound\n0.3,0,", 0) == 0);
}

TEST_CASE("brute force disagrees with the closed forms on derived instances") {
  const auto ev = family_example1(5, 4, 4, 0);
  // Agents 2 and 3 link to agent 1. Agent 1 pays nothing, yet its own
  // condition ln(14/6) >= 0.9 fails.
  const GameConfig star(ev, kLn, CostModel::homogeneous(0.9));
  CHECK(is_nash(star, LinkProfile::from_bitstring(3, "001010")));
  CHECK_FALSE(check_component_structure_ne(star, {0b111}));

  // Above c_u the empty network is the unique equilibrium, but linking
  // still pays socially.
  const GameConfig isolated(ev, kLn, CostModel::homogeneous(1.1));
  REQUIRE(classify(isolated) == Region::kIsolated);
  CHECK(poa_predict(isolated).value == 1.0);
  CHECK(*price_of_anarchy(isolated) == doctest::Approx(1.141007407899352).epsilon(1e-12));
}
