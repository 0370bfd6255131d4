#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cin/production.hpp"

using namespace cin;

namespace {

const BenefitFunction kLn = BenefitFunction::natural_log_one_plus();

ProductionProfile profile(int n, const std::string& bits, std::vector<double> production) {
  return {std::move(production), LinkProfile::from_bitstring(n, bits)};
}

}  // namespace

TEST_CASE("optimal stand-alone production") {
  CHECK(h_bar(kLn, 0.25) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(h_bar(kLn, 1.0) == 0.0);
  CHECK(h_bar(kLn, 2.0) == 0.0);
  CHECK(h_bar(kLn, 0.1) == doctest::Approx(9.0).epsilon(1e-9));
  CHECK(h_bar(BenefitFunction::power(0.5), 0.25) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK_THROWS_AS(h_bar(kLn, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(h_bar(BenefitFunction::linear(1.0), 0.5), std::domain_error);
}

TEST_CASE("configuration and grid") {
  const auto cfg = ProductionGameConfig::make(2, kLn, 0.25, 0.2, Aggregation::kSum);
  CHECK(cfg.delta == doctest::Approx(0.5));
  CHECK(cfg.low_cost());
  const auto g = cfg.grid();
  REQUIRE(g.size() == 7);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(3.0));

  const auto odd = ProductionGameConfig::make(2, kLn, 0.25, 0.2, Aggregation::kSum, 0.7);
  const auto og = odd.grid();
  CHECK(og.back() == doctest::Approx(3.5));
  CHECK(std::count_if(og.begin(), og.end(), [](double x) { return std::abs(x - 3.0) < 1e-9; }) == 1);

  const auto none = ProductionGameConfig::make(2, kLn, 2.0, 0.2, Aggregation::kMax);
  CHECK(none.grid() == std::vector<double>{0.0});

  // c = k h_bar is on the high-cost side.
  CHECK_FALSE(ProductionGameConfig::make(2, kLn, 0.25, 0.75, Aggregation::kSum).low_cost());
  CHECK(aggregation_from_name("max") == Aggregation::kMax);
  CHECK_THROWS(aggregation_from_name("mean"));
}

TEST_CASE("aggregation and utilities") {
  const std::vector<double> x{1.0, 2.5, 0.5};
  CHECK(aggregate(Aggregation::kSum, x, 0b101) == doctest::Approx(1.5));
  CHECK(aggregate(Aggregation::kMax, x, 0b111) == doctest::Approx(2.5));

  const auto cfg = ProductionGameConfig::make(2, kLn, 0.25, 0.2, Aggregation::kSum);
  const auto s = profile(2, "01", {3.0, 0.0});
  CHECK(production_utility(cfg, s, 1) == doctest::Approx(1.1862943611198906).epsilon(1e-12));
  CHECK(production_utility(cfg, s, 0) == doctest::Approx(0.6362943611198906).epsilon(1e-12));
}

TEST_CASE("equilibrium checks") {
  const auto high = ProductionGameConfig::make(2, kLn, 0.25, 1.0, Aggregation::kSum);
  CHECK(is_production_ne(high, profile(2, "00", {3.0, 3.0})));
  CHECK_FALSE(is_production_ne(high, profile(2, "01", {3.0, 0.0})));

  const auto sum = ProductionGameConfig::make(2, kLn, 0.25, 0.2, Aggregation::kSum);
  CHECK(is_production_ne(sum, profile(2, "01", {3.0, 0.0})));
  CHECK(is_production_ne(sum, profile(2, "01", {1.5, 1.5})));
  CHECK_FALSE(is_production_ne(sum, profile(2, "00", {3.0, 3.0})));

  const auto max = ProductionGameConfig::make(2, kLn, 0.25, 0.2, Aggregation::kMax);
  CHECK(is_production_ne(max, profile(2, "01", {3.0, 0.0})));
  CHECK_FALSE(is_production_ne(max, profile(2, "01", {1.5, 1.5})));
  CHECK_FALSE(is_production_ne(max, profile(2, "01", {0.0, 3.0})));
}

TEST_CASE("structure checks") {
  const auto sum = ProductionGameConfig::make(3, kLn, 0.25, 0.2, Aggregation::kSum);
  CHECK(check_sum_structure(sum, profile(3, "001010", {1.0, 1.0, 1.0})));
  CHECK_FALSE(check_sum_structure(sum, profile(3, "001010", {1.0, 1.0, 0.5})));
  CHECK_FALSE(check_sum_structure(sum, profile(3, "000010", {1.5, 0.0, 1.5})));
  // Agent 1's link brings 0.5 bits, less than c / k = 0.8.
  CHECK_FALSE(check_sum_structure(sum, profile(3, "100010", {2.5, 0.5, 0.0})));

  const auto max = ProductionGameConfig::make(3, kLn, 0.25, 0.2, Aggregation::kMax);
  CHECK(check_max_structure(max, profile(3, "001010", {3.0, 0.0, 0.0})));
  CHECK_FALSE(check_max_structure(max, profile(3, "001010", {3.0, 3.0, 0.0})));
  CHECK_FALSE(check_max_structure(max, profile(3, "100010", {3.0, 0.0, 0.0})));

  const auto high = ProductionGameConfig::make(3, kLn, 0.25, 1.0, Aggregation::kMax);
  CHECK(check_production_structure(high, profile(3, "000000", {3.0, 3.0, 3.0})));
  CHECK_FALSE(check_production_structure(high, profile(3, "001010", {3.0, 0.0, 0.0})));
}

TEST_CASE("enumeration on small games") {
  const auto high = ProductionGameConfig::make(2, kLn, 0.25, 1.0, Aggregation::kSum);
  const auto only = enumerate_production_ne(high);
  REQUIRE(only.size() == 1);
  CHECK(to_text(only[0]) == "00,3,3");

  const auto max = ProductionGameConfig::make(2, kLn, 0.25, 0.2, Aggregation::kMax);
  const auto stars = enumerate_production_ne(max);
  REQUIRE(stars.size() == 2);
  CHECK(to_text(stars[0]) == "01,3,0");
  CHECK(to_text(stars[1]) == "10,0,3");

  const auto sum = ProductionGameConfig::make(3, kLn, 0.25, 0.2, Aggregation::kSum);
  const auto ne = enumerate_production_ne(sum);
  CHECK_FALSE(ne.empty());
  for (const auto& s : ne) CHECK(check_sum_structure(sum, s));

  ProductionEnumOptions many;
  many.threads = 3;
  CHECK(enumerate_production_ne(sum, many) == ne);

  const auto big = ProductionGameConfig::make(6, kLn, 0.25, 0.2, Aggregation::kMax);
  CHECK_THROWS_AS(enumerate_production_ne(big), CapExceeded);
}

TEST_CASE("candidate equilibria above the full-scan size") {
  const auto max = ProductionGameConfig::make(4, kLn, 0.25, 0.2, Aggregation::kMax);
  const auto ne = enumerate_production_ne(max);
  // 16 labeled trees, each oriented toward any of its 4 roots.
  CHECK(ne.size() == 64);
  for (const auto& s : ne) {
    CHECK(is_production_ne(max, s));
    CHECK(check_max_structure(max, s));
  }
}

TEST_CASE("metrics and sweeps") {
  const auto max = ProductionGameConfig::make(3, kLn, 0.25, 0.2, Aggregation::kMax);
  const auto m = few_metrics(max, profile(3, "001010", {3.0, 0.0, 0.0}));
  CHECK(m.producer_fraction == doctest::Approx(1.0 / 3));
  CHECK(m.total_information == doctest::Approx(3.0));

  const std::vector<int> ns{2, 3, 4, 5, 6};
  for (const auto& r : few_sweep(max, ns)) {
    CHECK(r.producer_fraction == doctest::Approx(1.0 / r.n));
    CHECK(r.total_information == doctest::Approx(3.0));
  }
  const auto high = ProductionGameConfig::make(2, kLn, 0.25, 1.0, Aggregation::kSum);
  for (const auto& r : few_sweep(high, ns)) {
    CHECK(r.producer_fraction == 1.0);
    CHECK(r.total_information == doctest::Approx(3.0 * r.n));
  }
  const auto sum = ProductionGameConfig::make(2, kLn, 0.25, 0.3, Aggregation::kSum);
  const auto rows = few_sweep(sum, ns);
  for (const auto& r : rows) {
    CHECK(r.producer_fraction == 1.0);
    CHECK(r.total_information == doctest::Approx(3.0));
  }
  std::ostringstream csv;
  write_few_csv(csv, rows);
  CHECK(csv.str().rfind("n,agg,c,k,h_bar,producer_fraction,total_information_bits\n2,sum,0.3,0.25,3,1,3\n", 0) ==
        0);
}

TEST_CASE("profile text round trip") {
  const auto s = profile(3, "100001", {0.5, 0.0, 2.25});
  CHECK(to_text(s) == "100001,0.5,0,2.25");
  CHECK(production_profile_from_text(3, to_text(s)) == s);
  CHECK_THROWS(production_profile_from_text(3, "100001,0.5,0"));
  CHECK_THROWS(production_profile_from_text(3, "100001,0.5,0,-1"));
}
