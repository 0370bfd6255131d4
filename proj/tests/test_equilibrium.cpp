#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cin/analytic.hpp"
#include "cin/equilibrium.hpp"
#include "cin/experiment.hpp"

using namespace cin;

namespace {

GameConfig bits_game(double c, bool identical = false) {
  const std::vector<double> h{1, 1};
  return GameConfig(identical ? family_max_correlated(h) : family_independent(h), BenefitFunction::log_one_plus(),
                    CostModel::homogeneous(c));
}

std::vector<std::string> bitstrings(const NashSet& ne) {
  std::vector<std::string> out;
  for (const auto& p : ne.profiles) out.push_back(p.bitstring());
  return out;
}

}  // namespace

TEST_CASE("best responses on two bits") {
  CHECK(best_responses(bits_game(0.3), LinkProfile(2), 0) == std::vector<AgentSet>{0b10});
  CHECK(best_responses(bits_game(2.0), LinkProfile(2), 0) == std::vector<AgentSet>{0b00});
  CHECK(best_responses(bits_game(0.1, true), LinkProfile(2), 0) == std::vector<AgentSet>{0b00});
  // Agent 2 already links to agent 1, so agent 1 is indifferent at zero cost.
  const auto tie = best_responses(bits_game(0.0), LinkProfile::from_bitstring(2, "01"), 0);
  CHECK(tie == std::vector<AgentSet>{0b00, 0b10});
}

TEST_CASE("nash checks on two bits") {
  CHECK(is_nash(bits_game(0.3), LinkProfile::from_bitstring(2, "10")));
  CHECK_FALSE(is_nash(bits_game(0.3), LinkProfile::from_bitstring(2, "11")));
  CHECK(is_strict_nash(bits_game(2.0), LinkProfile(2)));
  CHECK_FALSE(is_strict_nash(bits_game(0.0), LinkProfile::from_bitstring(2, "10")));
}

TEST_CASE("two-bit equilibrium sets") {
  CHECK(bitstrings(enumerate_nash(bits_game(0.3))) == std::vector<std::string>{"01", "10"});

  // H1 = 2 > H2 = 1, independent: only agent 2 wants to link when
  // f(3) - f(2) < c < f(3) - f(1).
  const GameConfig cfg(family_independent(std::vector<double>{2, 1}), BenefitFunction::log_one_plus(),
                       CostModel::homogeneous(0.6));
  CHECK(bitstrings(enumerate_nash(cfg)) == std::vector<std::string>{"01"});
}

TEST_CASE("duplicate links never survive") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const auto cfg = random_game(rng, 2 + trial % 3, CostModel::Kind::kHomogeneous);
    for (const auto& p : enumerate_nash(cfg).profiles) {
      for (int i = 0; i < cfg.n_agents(); ++i) {
        for (int j = i + 1; j < cfg.n_agents(); ++j) CHECK_FALSE((p.link(i, j) && p.link(j, i)));
      }
    }
  }
}

TEST_CASE("social optimum on forests matches the exhaustive scan") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const auto kind = static_cast<CostModel::Kind>(trial % 3);
    const auto cfg = random_game(rng, 2 + trial % 3, kind);
    const auto fast = social_optimum(cfg);
    const auto slow = social_optimum_exhaustive(cfg);
    CHECK(fast.value == doctest::Approx(slow.value).epsilon(1e-12));
    CHECK(social_welfare(cfg, fast.profile) == doctest::Approx(fast.value).epsilon(1e-12));
  }
}

TEST_CASE("optimum values in the connected regions") {
  const auto f = BenefitFunction::natural_log_one_plus();
  const auto ev = family_example1(5, 4, 4, 0);
  const GameConfig hom(ev, f, CostModel::homogeneous(0.3));
  CHECK(social_optimum(hom).value == doctest::Approx(3 * std::log(14.0) - 2 * 0.3));

  const GameConfig het(ev, f, CostModel::recipient_dependent({0.1, 0.2, 0.3}));
  const auto opt = social_optimum(het);
  CHECK(opt.value == doctest::Approx(3 * std::log(14.0) - 2 * 0.1));
  // Periphery-sponsored star on the cheapest agent.
  CHECK(opt.profile.bitstring() == "001010");
}

TEST_CASE("price of anarchy and information loss on derived instances") {
  const auto f = BenefitFunction::natural_log_one_plus();
  const auto ev = family_example1(5, 4, 4, 0);
  const GameConfig het(ev, f, CostModel::recipient_dependent({0.1, 0.2, 0.3}));
  const auto poa = price_of_anarchy(het);
  REQUIRE(poa.has_value());
  CHECK(*poa == doctest::Approx(1.0404466824351857).epsilon(1e-9));

  const GameConfig mixed(ev, f, CostModel::homogeneous(0.75));
  CHECK(max_information_loss(mixed) == doctest::Approx(9.0).epsilon(1e-12));

  const GameConfig connected(ev, f, CostModel::homogeneous(0.2));
  CHECK(*price_of_anarchy(connected) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(max_information_loss(connected) == doctest::Approx(0.0));
}

TEST_CASE("recipient-dependent costs can rule out pure equilibria") {
  const EntropicVector ev(3, {0.6105666585157592, 1.5792666390651828, 2.1582798073054805, 0.98873161701470136,
                              1.4956522557472289, 2.5491973460289707, 2.8829711845587815});
  REQUIRE(validate_shannon(ev).ok());
  const GameConfig cfg(ev, BenefitFunction::log_one_plus(),
                       CostModel::recipient_dependent({1.7607985603805498, 0.71683990120157848, 0.6365550766888417}));
  CHECK(enumerate_nash(cfg).profiles.empty());
  CHECK_FALSE(price_of_anarchy(cfg).has_value());
  CHECK(max_information_loss(cfg) == 0.0);
}

TEST_CASE("price of anarchy is undefined without positive equilibrium welfare") {
  const GameConfig cfg(family_independent(std::vector<double>{0, 0}), BenefitFunction::log_one_plus(),
                       CostModel::homogeneous(0.5));
  CHECK_FALSE(price_of_anarchy(cfg).has_value());
}

TEST_CASE("report invariants on random games") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto cfg = random_game(rng, 2 + trial % 3, static_cast<CostModel::Kind>(trial % 3));
    const auto r = analyze_equilibria(cfg);
    if (cfg.costs.kind() == CostModel::Kind::kHomogeneous) REQUIRE_FALSE(r.ne_profiles.empty());
    if (r.ne_profiles.empty()) continue;
    CHECK(r.worst_ne_welfare <= r.social_optimum_value + 1e-9);
    if (r.poa) CHECK(*r.poa >= 1.0 - 1e-9);
    CHECK(r.mil >= 0.0);
    if (r.ne_profiles.size() == 1) CHECK(r.mil == 0.0);
    for (const auto& p : r.strict_ne_profiles) CHECK(is_nash(cfg, p));
  }
}

TEST_CASE("strict set is stable under a halved tolerance") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    const auto cfg = random_game(rng, 3, CostModel::Kind::kHomogeneous);
    EnumerationOptions half;
    half.tolerance = kTolerance / 2;
    const auto a = enumerate_nash(cfg);
    const auto b = enumerate_nash(cfg, half);
    CHECK(bitstrings(a) == bitstrings(b));
    CHECK(a.strict == b.strict);
  }
}

TEST_CASE("threads and pruning do not change the result") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto cfg = random_game(rng, 4, CostModel::Kind::kHomogeneous);
    EnumerationOptions many;
    many.threads = 4;
    EnumerationOptions pruned;
    pruned.prune = true;
    const auto base = enumerate_nash(cfg);
    CHECK(bitstrings(enumerate_nash(cfg, many)) == bitstrings(base));
    CHECK(bitstrings(enumerate_nash(cfg, pruned)) == bitstrings(base));
  }
}

TEST_CASE("caps") {
  const GameConfig six(family_independent(std::vector<double>(6, 1.0)), BenefitFunction::log_one_plus(),
                       CostModel::homogeneous(5.0));
  CHECK_THROWS_AS(enumerate_nash(six), CapExceeded);
  EnumerationOptions opts;
  opts.max_agents = 6;
  opts.threads = 4;
  const auto ne = enumerate_nash(six, opts);
  REQUIRE(ne.profiles.size() == 1);
  CHECK(ne.profiles[0].link_count() == 0);
}

TEST_CASE("report writers") {
  const auto r = analyze_equilibria(bits_game(0.3));
  std::ostringstream csv;
  write_report_csv(csv, bits_game(0.3), r);
  CHECK(csv.str().rfind("profile,welfare,info_1,info_2,strict\n01,", 0) == 0);
  std::ostringstream text;
  write_report_text(text, bits_game(0.3), r);
  CHECK(text.str().find("equilibria: 2") != std::string::npos);
}
