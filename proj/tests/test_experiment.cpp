#include <doctest.h>

#include <fmt/format.h>

#include <sstream>

#include "cin/experiment.hpp"

using namespace cin;

namespace {

const char* kExampleSpec =
    "# example family on a coarse grid\n"
    "seed = 4\n"
    "entropy.family = example1\n"
    "entropy.h = 5,4,4\n"
    "benefit = ln_1p\n"
    "cost.c = 0.75\n"
    "grid.c = 0.25:1.25:3\n"
    "grid.kl = 0,2\n"
    "verify.random_instances = 6\n"
    "verify.random_agents = 3\n";

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("key-value documents") {
  const auto doc = KeyValueDoc::parse("# comment\n\n a = 1.5 \nb=x,y\n");
  CHECK(doc.require_double("a") == 1.5);
  CHECK(doc.require("b") == "x,y");
  CHECK(doc.get_or("c", "none") == "none");
  CHECK_THROWS_AS(KeyValueDoc::parse("a = 1\na = 2\n"), KeyValueError);
  CHECK_THROWS_AS(KeyValueDoc::parse("just words\n"), KeyValueError);
  CHECK_THROWS_AS(doc.require("c"), KeyValueError);
  CHECK_THROWS(parse_double("1.5x"));
  CHECK_THROWS(parse_double("nan"));
  CHECK(parse_int("-3") == -3);
}

TEST_CASE("grids") {
  CHECK(parse_grid("0:1:5") == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(parse_grid("2:2:1") == std::vector<double>{2.0});
  CHECK(parse_grid("0.1, 0.3") == std::vector<double>{0.1, 0.3});
  CHECK_THROWS(parse_grid("0:1:0"));
  CHECK_THROWS(parse_grid("0:1"));
}

TEST_CASE("spec loading") {
  const auto spec = load_spec(kExampleSpec);
  CHECK(spec.hash == fnv1a64(kExampleSpec));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  const auto cfg = game_from_spec(spec);
  CHECK(cfg.n_agents() == 3);
  CHECK(cfg.ev.joint() == doctest::Approx(13.0));
  CHECK(cfg.costs.homogeneous_cost() == 0.75);

  CHECK_THROWS_AS(load_spec("entropy.hh = 1\n"), SpecError);
  CHECK_THROWS_AS(load_spec("cost.c = 1\ncost.c = 2\n"), SpecError);
}

TEST_CASE("invalid games are spec errors") {
  // H(1,2) > H(1) + H(2).
  const auto bad = load_spec("entropy.source = inline\nn_agents = 2\nentropy.values = 1,1,3\ncost.c = 0.1\n");
  CHECK_THROWS_AS(game_from_spec(bad), SpecError);
  const auto short_values = load_spec("entropy.source = inline\nn_agents = 2\nentropy.values = 1,1\ncost.c = 0.1\n");
  CHECK_THROWS_AS(game_from_spec(short_values), SpecError);
  CHECK_THROWS_AS(game_from_spec(load_spec("entropy.h = 1,1\n")), SpecError);
  CHECK_THROWS_AS(game_from_spec(load_spec("entropy.h = 1,1\ncost.c = -1\n")), SpecError);
  CHECK_THROWS_AS(game_from_spec(load_spec("entropy.h = 1,1\ncost.c = 1\nbenefit = cubic\n")), SpecError);
  CHECK_THROWS_AS(
      game_from_spec(load_spec("entropy.h = 1,1\ncost.model = recipient\ncost.values = 1,2,3\n")), SpecError);
}

TEST_CASE("cost models from specs") {
  const auto rec = game_from_spec(
      load_spec("entropy.family = example1\nentropy.h = 5,4,4\ncost.model = recipient\ncost.values = 0.1,0.2,0.3\n"));
  CHECK(rec.cost(1, 2) == doctest::Approx(0.3));
  const auto gen = game_from_spec(load_spec("entropy.h = 1,1\ncost.model = general\ncost.matrix = 0,1;2,0\n"));
  CHECK(gen.cost(1, 0) == doctest::Approx(2.0));
}

TEST_CASE("enumerate output") {
  const auto spec = load_spec(kExampleSpec);
  const auto out = lines(run_enumerate(spec, {}));
  REQUIRE(out.size() > 3);
  CHECK(out[0] == fmt::format("# spec_hash={:016x} command=enumerate seed=4 max_n=5 full_scan_agents=5 "
                              "production_full_scan_agents=3",
                              spec.hash));
  RunOptions seeded;
  seeded.seed = 9;
  seeded.seed_given = true;
  CHECK(lines(run_enumerate(spec, seeded))[0].find("seed=9") != std::string::npos);
}

TEST_CASE("region rows are kl-major") {
  const auto out = lines(run_regions(load_spec(kExampleSpec), {}));
  REQUIRE(out.size() == 8);
  CHECK(out[1] == "c,kl,region,c_l,c_u,poa_or_bound,mil_or_bound");
  CHECK(out[2].rfind("0.25,0,K_C,", 0) == 0);
  CHECK(out[3].rfind("0.75,0,K_M,", 0) == 0);
  CHECK(out[4].rfind("1.25,0,K_I,", 0) == 0);
  CHECK(out[5].rfind("0.25,2,", 0) == 0);
}

TEST_CASE("metric sweeps") {
  const auto spec = load_spec(kExampleSpec);
  const auto poa = lines(run_poa_sweep(spec, {}));
  REQUIRE(poa.size() == 8);
  CHECK(poa[1] == "c,kl,region,poa_predicted,predicted_is_bound,poa_brute_force");
  CHECK(poa[2] == "0.25,0,K_C,1,0,1");
  const auto mil = lines(run_mil_sweep(spec, {}));
  CHECK(mil[3] == "0.75,0,K_M,9,1,9");

  const auto rec = load_spec(
      "entropy.family = example1\nentropy.h = 5,4,4\nbenefit = ln_1p\ncost.model = recipient\n"
      "cost.values = 0.1,0.2,0.3\ngrid.kl = 0\n");
  const auto het = lines(run_poa_sweep(rec, {}));
  REQUIRE(het.size() == 3);
  CHECK(het[2] == "0.1;0.2;0.3,0,K_C,1.04044668244,0,1.04044668244");

  CHECK_THROWS_AS(run_regions(load_spec("entropy.h = 1,1\ngrid.c = 1\ngrid.kl = 0\n"), {}), SpecError);
}

TEST_CASE("production outputs") {
  const auto spec = load_spec("benefit = ln_1p\nproduction.k = 0.25\nproduction.c = 0.2\nproduction.agg = max\n");
  const auto out = lines(run_production(spec, {}));
  REQUIRE(out.size() == 5);
  CHECK(out[2] == "links,production_1,production_2,producer_fraction,total_information_bits,structure_ok");
  CHECK(out[3] == "01,3,0,0.5,3,1");

  const auto few = load_spec("benefit = ln_1p\nproduction.k = 0.25\nproduction.c = 1\nfew.n = 2,3\n");
  const auto rows = lines(run_few_sweep(few, {}));
  REQUIRE(rows.size() == 4);
  CHECK(rows[2] == "2,sum,1,0.25,3,1,6");
  CHECK(rows[3] == "3,sum,1,0.25,3,1,9");

  CHECK_THROWS_AS(run_few_sweep(load_spec("production.k = 0.25\nproduction.c = 1\nfew.n = 2.5\n"), {}), SpecError);
  CHECK_THROWS_AS(run_production(load_spec("production.c = 1\n"), {}), SpecError);
}

TEST_CASE("verify is deterministic") {
  const auto spec = load_spec(std::string(kExampleSpec) + "production.k = 0.25\nproduction.c = 0.2\nfew.n = 2,3,4\n");
  RunOptions one;
  RunOptions four;
  four.threads = 4;
  const auto a = run_verify(spec, one);
  const auto b = run_verify(spec, four);
  CHECK(a.report == b.report);
  CHECK(a.report.find("summary: ") != std::string::npos);
  CHECK(lines(a.report)[0].find("command=verify seed=4") != std::string::npos);
}
