#include "cin/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace cin {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "seed",          "n_agents",       "entropy.source",   "entropy.family",  "entropy.h",
      "entropy.kl",    "entropy.values", "entropy.file",     "benefit",         "benefit.alpha",
      "benefit.slope", "benefit.base",   "cost.model",       "cost.c",          "cost.values",
      "cost.matrix",   "grid.c",         "grid.kl",          "production.agg",  "production.k",
      "production.c",  "production.delta", "few.n",          "verify.random_instances",
      "verify.random_agents",
  };
  return keys;
}

// Turns library argument errors into spec errors.
template <typename F>
auto spec_guard(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SpecError&) {
    throw;
  } catch (const CapExceeded&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  } catch (const KeyValueError& e) {
    throw SpecError(e.what());
  } catch (const std::out_of_range& e) {
    throw SpecError(e.what());
  }
}

std::uint64_t effective_seed(const ExperimentSpec& spec, const RunOptions& opts) {
  if (opts.seed_given) return opts.seed;
  const long long s = spec_guard([&] { return spec.doc.get_int("seed", 0); });
  if (s < 0) throw SpecError("seed must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

std::string header(const ExperimentSpec& spec, std::string_view command, const RunOptions& opts) {
  return fmt::format("# spec_hash={:016x} command={} seed={} max_n={} full_scan_agents={} production_full_scan_agents={}\n",
                     spec.hash, command, effective_seed(spec, opts), opts.max_n, kFullScanAgents,
                     kProductionFullScanAgents);
}

BenefitFunction benefit_from_spec(const KeyValueDoc& doc) {
  const std::string name = doc.get_or("benefit", "log2_1p");
  if (name == "log2_1p") return BenefitFunction::log_one_plus(2.0);
  if (name == "ln_1p") return BenefitFunction::natural_log_one_plus();
  if (name == "log_1p") return BenefitFunction::log_one_plus(doc.require_double("benefit.base"));
  if (name == "power") return BenefitFunction::power(doc.require_double("benefit.alpha"));
  if (name == "linear") return BenefitFunction::linear(doc.get_double("benefit.slope", 1.0));
  throw SpecError(fmt::format("unknown benefit '{}'", name));
}

std::ifstream open_input(const ExperimentSpec& spec, const std::string& name) {
  std::filesystem::path p(name);
  if (p.is_relative()) p = spec.base_dir / p;
  std::ifstream in(p);
  if (!in) throw SpecError(fmt::format("cannot open '{}'", p.string()));
  return in;
}

EntropicVector entropy_from_spec(const ExperimentSpec& spec) {
  const auto& doc = spec.doc;
  const std::string source = doc.get_or("entropy.source", "family");
  EntropicVector ev = [&] {
    if (source == "family") {
      const std::string family = doc.get_or("entropy.family", "independent");
      const auto h = doc.get_doubles("entropy.h");
      if (family == "independent") return family_independent(h);
      if (family == "max_correlated") return family_max_correlated(h);
      if (family == "example1") {
        if (h.size() != 3) throw SpecError("entropy.h needs three values for example1");
        return family_example1(h[0], h[1], h[2], doc.get_double("entropy.kl", 0.0));
      }
      throw SpecError(fmt::format("unknown entropy family '{}'", family));
    }
    if (source == "inline") {
      const auto n = doc.get_int("n_agents", 0);
      if (n < 1 || n > kMaxAgents) throw SpecError("inline entropy needs n_agents in [1, 16]");
      return EntropicVector(static_cast<int>(n), doc.get_doubles("entropy.values"));
    }
    if (source == "file") {
      auto in = open_input(spec, doc.require("entropy.file"));
      return read_entropic_vector(in);
    }
    if (source == "pmf") {
      auto in = open_input(spec, doc.require("entropy.file"));
      return from_joint_pmf(read_pmf_csv(in));
    }
    throw SpecError(fmt::format("unknown entropy source '{}'", source));
  }();
  if (doc.has("n_agents") && doc.get_int("n_agents", 0) != ev.n_agents()) {
    throw SpecError("n_agents does not match the entropy vector");
  }
  const auto report = validate_shannon(ev);
  if (!report.ok()) {
    throw SpecError(fmt::format("entropy vector violates {} Shannon inequalities, first: {}", report.violations.size(),
                                report.violations.front().describe()));
  }
  return ev;
}

CostModel cost_from_spec(const KeyValueDoc& doc, int n) {
  const std::string model = doc.get_or("cost.model", "homogeneous");
  if (model == "homogeneous") return CostModel::homogeneous(doc.require_double("cost.c"));
  if (model == "recipient") {
    auto c = doc.get_doubles("cost.values");
    if (static_cast<int>(c.size()) != n) throw SpecError("cost.values needs one value per agent");
    return CostModel::recipient_dependent(std::move(c));
  }
  if (model == "general") {
    std::vector<std::vector<double>> m;
    std::stringstream rows(doc.require("cost.matrix"));
    for (std::string row; std::getline(rows, row, ';');) m.push_back(parse_double_list(row));
    if (static_cast<int>(m.size()) != n) throw SpecError("cost.matrix needs one row per agent");
    return CostModel::general(std::move(m));
  }
  throw SpecError(fmt::format("unknown cost model '{}'", model));
}

struct ExampleFamily {
  double h1, h2, h3;
};

ExampleFamily example_family(const KeyValueDoc& doc) {
  if (doc.get_or("entropy.family", "") != "example1" || doc.get_or("entropy.source", "family") != "family") {
    throw SpecError("sweeps need entropy.family = example1");
  }
  const auto h = doc.get_doubles("entropy.h");
  if (h.size() != 3) throw SpecError("entropy.h needs three values for example1");
  return {h[0], h[1], h[2]};
}

EnumerationOptions enum_options(const RunOptions& opts) {
  EnumerationOptions e;
  e.max_agents = opts.max_n;
  e.threads = std::max(1U, opts.threads);
  return e;
}

ProductionEnumOptions production_options(const RunOptions& opts) {
  ProductionEnumOptions e;
  e.max_agents = opts.max_n;
  e.threads = std::max(1U, opts.threads);
  return e;
}

std::string number(double x) { return fmt::format("{:.12g}", x); }

std::string optional_number(const std::optional<double>& x) { return x ? number(*x) : "undefined"; }

std::string join_costs(const std::vector<double>& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) out += (i ? ";" : "") + number(c[i]);
  return out;
}

enum class SweepMetric { kPoa, kMil };

std::string run_metric_sweep(const ExperimentSpec& spec, const RunOptions& opts, SweepMetric metric,
                             std::string_view command) {
  return spec_guard([&] {
    const auto& doc = spec.doc;
    const ExampleFamily fam = example_family(doc);
    const BenefitFunction f = benefit_from_spec(doc);
    const auto kl_grid = parse_grid(doc.require("grid.kl"));
    const std::string model = doc.get_or("cost.model", "homogeneous");
    const auto eo = enum_options(opts);

    std::vector<std::pair<std::string, CostModel>> costs;
    if (model == "homogeneous") {
      for (double c : parse_grid(doc.require("grid.c"))) costs.emplace_back(number(c), CostModel::homogeneous(c));
    } else if (model == "recipient") {
      auto values = doc.get_doubles("cost.values");
      if (values.size() != 3) throw SpecError("cost.values needs three values");
      costs.emplace_back(join_costs(values), CostModel::recipient_dependent(values));
    } else {
      throw SpecError("sweeps support homogeneous or recipient costs");
    }

    std::string out = header(spec, command, opts);
    out += metric == SweepMetric::kPoa ? "c,kl,region,poa_predicted,predicted_is_bound,poa_brute_force\n"
                                       : "c,kl,region,mil_predicted,predicted_is_bound,mil_brute_force\n";
    for (double kl : kl_grid) {
      const auto ev = family_example1(fam.h1, fam.h2, fam.h3, kl);
      for (const auto& [label, cost] : costs) {
        const GameConfig cfg(ev, f, cost);
        const NashSet ne = enumerate_nash(cfg, eo);
        Prediction pred{};
        std::string brute;
        if (metric == SweepMetric::kPoa) {
          pred = poa_predict(cfg);
          brute = optional_number(price_of_anarchy(cfg, ne, social_optimum(cfg, eo)));
        } else {
          pred = mil_predict(cfg);
          brute = number(max_information_loss(cfg, ne));
        }
        out += fmt::format("{},{},{},{},{},{}\n", label, number(kl), region_label(pred.region), number(pred.value),
                           pred.is_bound ? 1 : 0, brute);
      }
    }
    return out;
  });
}

bool has_duplicate_pair(const LinkProfile& p) {
  for (int i = 0; i < p.n_agents(); ++i) {
    for (int j = i + 1; j < p.n_agents(); ++j) {
      if (p.link(i, j) && p.link(j, i)) return true;
    }
  }
  return false;
}

bool is_core_sponsored_star_forest(const LinkProfile& p) {
  for (AgentSet block : components(p)) {
    if (std::popcount(block) < 2) continue;
    int cores = 0;
    for (AgentSet m = block; m; m &= m - 1) {
      const int j = std::countr_zero(m);
      if (p.row(j) == (block & ~singleton(j))) {
        ++cores;
      } else if (p.row(j) != 0) {
        return false;
      }
    }
    if (cores != 1) return false;
  }
  return true;
}

std::string partition_text(const Partition& part) {
  std::string out = "{";
  for (std::size_t b = 0; b < part.size(); ++b) {
    out += b ? ",{" : "{";
    bool first = true;
    for (AgentSet m = part[b]; m; m &= m - 1) {
      out += fmt::format("{}{}", first ? "" : " ", std::countr_zero(m) + 1);
      first = false;
    }
    out += "}";
  }
  return out + "}";
}

CheckResult make_check(std::string name, bool passed, std::string detail = {}) {
  return {std::move(name), passed, std::move(detail)};
}

}  // namespace

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentSpec load_spec(std::string text, std::filesystem::path base_dir) {
  ExperimentSpec spec;
  spec.hash = fnv1a64(text);
  spec.doc = spec_guard([&] { return KeyValueDoc::parse(text); });
  for (const auto& key : spec.doc.keys()) {
    if (!known_keys().contains(key)) throw SpecError(fmt::format("unknown key '{}'", key));
  }
  spec.text = std::move(text);
  spec.base_dir = std::move(base_dir);
  return spec;
}

ExperimentSpec load_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError(fmt::format("cannot open spec '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return load_spec(buf.str(), path.parent_path());
}

GameConfig game_from_spec(const ExperimentSpec& spec) {
  return spec_guard([&] {
    EntropicVector ev = entropy_from_spec(spec);
    const int n = ev.n_agents();
    return GameConfig(std::move(ev), benefit_from_spec(spec.doc), cost_from_spec(spec.doc, n));
  });
}

ProductionGameConfig production_from_spec(const ExperimentSpec& spec) {
  return spec_guard([&] {
    const auto& doc = spec.doc;
    return ProductionGameConfig::make(static_cast<int>(doc.get_int("n_agents", 2)), benefit_from_spec(doc),
                                      doc.require_double("production.k"), doc.require_double("production.c"),
                                      aggregation_from_name(doc.get_or("production.agg", "sum")),
                                      doc.get_double("production.delta", 0.0));
  });
}

std::string run_enumerate(const ExperimentSpec& spec, const RunOptions& opts) {
  const GameConfig cfg = game_from_spec(spec);
  const EquilibriumReport report = analyze_equilibria(cfg, enum_options(opts));
  std::ostringstream text;
  write_report_text(text, cfg, report);
  std::string out = header(spec, "enumerate", opts);
  std::istringstream lines(text.str());
  for (std::string line; std::getline(lines, line);) out += "# " + line + "\n";
  std::ostringstream csv;
  write_report_csv(csv, cfg, report);
  return out + csv.str();
}

std::string run_regions(const ExperimentSpec& spec, const RunOptions& opts) {
  return spec_guard([&] {
    const auto& doc = spec.doc;
    const ExampleFamily fam = example_family(doc);
    const auto rows = region_sweep(fam.h1, fam.h2, fam.h3, benefit_from_spec(doc), parse_grid(doc.require("grid.c")),
                                   parse_grid(doc.require("grid.kl")));
    std::ostringstream csv;
    write_region_csv(csv, rows);
    return header(spec, "regions", opts) + csv.str();
  });
}

std::string run_poa_sweep(const ExperimentSpec& spec, const RunOptions& opts) {
  return run_metric_sweep(spec, opts, SweepMetric::kPoa, "poa-sweep");
}

std::string run_mil_sweep(const ExperimentSpec& spec, const RunOptions& opts) {
  return run_metric_sweep(spec, opts, SweepMetric::kMil, "mil-sweep");
}

std::string run_production(const ExperimentSpec& spec, const RunOptions& opts) {
  const ProductionGameConfig cfg = production_from_spec(spec);
  const auto ne = enumerate_production_ne(cfg, production_options(opts));
  std::string out = header(spec, "production", opts);
  out += fmt::format("# agents={} agg={} k={} c={} h_bar={} delta={} equilibria={}\n", cfg.n_agents,
                     aggregation_name(cfg.agg), number(cfg.k), number(cfg.c), number(cfg.h_bar), number(cfg.delta),
                     ne.size());
  out += "links";
  for (int i = 0; i < cfg.n_agents; ++i) out += fmt::format(",production_{}", i + 1);
  out += ",producer_fraction,total_information_bits,structure_ok\n";
  for (const auto& s : ne) {
    const FewMetrics m = few_metrics(cfg, s);
    out += to_text(s);
    out += fmt::format(",{},{},{}\n", number(m.producer_fraction), number(m.total_information),
                       check_production_structure(cfg, s) ? 1 : 0);
  }
  return out;
}

std::string run_few_sweep(const ExperimentSpec& spec, const RunOptions& opts) {
  const ProductionGameConfig base = production_from_spec(spec);
  const std::vector<int> n_list = spec_guard([&] {
    std::vector<int> out;
    for (double x : spec.doc.get_doubles("few.n")) {
      if (x != std::floor(x) || x < 1 || x > kProductionCheckAgents) {
        throw SpecError(fmt::format("few.n entries must be integers in [1, {}]", kProductionCheckAgents));
      }
      out.push_back(static_cast<int>(x));
    }
    return out;
  });
  const auto rows = few_sweep(base, n_list, production_options(opts));
  std::ostringstream csv;
  write_few_csv(csv, rows);
  return header(spec, "few-sweep", opts) + csv.str();
}

std::vector<CheckResult> verify_formation_instance(const GameConfig& cfg, const std::string& label,
                                                   const EnumerationOptions& opts) {
  std::vector<CheckResult> out;
  const int n = cfg.n_agents();
  const NashSet ne = enumerate_nash(cfg, opts);
  const SocialOptimum opt = social_optimum(cfg, opts);

  out.push_back(make_check(label + " equilibrium exists", !ne.profiles.empty()));

  std::string bad;
  for (const auto& p : ne.profiles) {
    bool trees = !has_duplicate_pair(p);
    for (AgentSet comp : components(p)) trees = trees && is_minimally_connected(p, comp);
    if (!trees && bad.empty()) bad = p.bitstring();
  }
  out.push_back(make_check(label + " equilibrium components are trees", bad.empty(), bad));

  const double mil = max_information_loss(cfg, ne);
  double least = cfg.ev.joint();
  for (int i = 0; i < n; ++i) least = std::min(least, cfg.ev(singleton(i)));
  out.push_back(make_check(label + " MIL within H(all) - min H(X_i)", mil <= cfg.ev.joint() - least + kTolerance,
                           fmt::format("mil={}", number(mil))));

  if (cfg.costs.kind() == CostModel::Kind::kGeneral || n < 2) return out;

  const Region region = classify(cfg);
  const bool homogeneous = cfg.costs.kind() == CostModel::Kind::kHomogeneous;
  bool sure_connected = region == Region::kConnected;
  bool sure_isolated = region == Region::kIsolated;
  if (homogeneous) {
    // Boundary costs admit ties; only the open regions are asserted.
    const Thresholds t = thresholds_homogeneous(cfg.ev, cfg.f);
    const double c = cfg.costs.homogeneous_cost();
    sure_connected = c < t.c_l;
    sure_isolated = c > t.c_u;
  }
  if (sure_connected) {
    std::string why;
    for (const auto& p : ne.profiles) {
      bool ok = components(p).size() == 1;
      for (int i = 0; i < n && ok; ++i) ok = std::abs(gathered_information(cfg, p, i) - cfg.ev.joint()) <= kTolerance;
      if (!ok && why.empty()) why = p.bitstring();
    }
    out.push_back(make_check(label + " connected region: every equilibrium shares everything", why.empty(), why));
  }
  if (sure_isolated) {
    const bool ok = ne.profiles.size() == 1 && ne.profiles.front().link_count() == 0;
    out.push_back(make_check(label + " isolated region: the empty network is the unique equilibrium", ok,
                             fmt::format("{} equilibria", ne.profiles.size())));
  }

  const Prediction pp = poa_predict(cfg);
  const auto poa = price_of_anarchy(cfg, ne, opt);
  if (pp.is_bound) {
    out.push_back(make_check(label + " PoA below the mixed-region bound", poa && *poa < pp.value,
                             fmt::format("poa={} bound={}", optional_number(poa), number(pp.value))));
  } else {
    out.push_back(make_check(fmt::format("{} PoA matches closed form in {}", label, region_label(pp.region)),
                             poa && std::abs(*poa - pp.value) <= 1e-6,
                             fmt::format("poa={} predicted={}", optional_number(poa), number(pp.value))));
  }
  const Prediction mp = mil_predict(cfg);
  if (!mp.is_bound) {
    out.push_back(make_check(fmt::format("{} MIL zero in {}", label, region_label(mp.region)),
                             std::abs(mil) <= kTolerance, fmt::format("mil={}", number(mil))));
  }

  std::set<Partition> realized;
  for (const auto& p : ne.profiles) realized.insert(canonical(components(p)));
  std::string mismatch;
  for (const auto& part : all_partitions(n)) {
    const bool predicted = check_component_structure_ne(cfg, part);
    const bool found = realized.contains(canonical(part));
    if (predicted != found && mismatch.empty()) {
      mismatch = fmt::format("{} predicted={} realized={}", partition_text(part), predicted, found);
    }
  }
  out.push_back(make_check(label + " component conditions match realized partitions", mismatch.empty(), mismatch));

  if (homogeneous) {
    std::string shape;
    for (std::size_t k = 0; k < ne.profiles.size(); ++k) {
      if (ne.strict[k] && !is_core_sponsored_star_forest(ne.profiles[k]) && shape.empty()) {
        shape = ne.profiles[k].bitstring();
      }
    }
    out.push_back(make_check(label + " strict equilibria are core-sponsored stars", shape.empty(), shape));

    if (n <= 4) {
      std::set<std::string> strict;
      for (std::size_t k = 0; k < ne.profiles.size(); ++k) {
        if (ne.strict[k]) strict.insert(ne.profiles[k].bitstring());
      }
      const int bits = n * (n - 1);
      std::string diff;
      std::string s(bits, '0');
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits) && diff.empty(); ++code) {
        for (int b = 0; b < bits; ++b) s[b] = ((code >> (bits - 1 - b)) & 1U) ? '1' : '0';
        const bool predicted = check_strict_ne_structure(cfg, LinkProfile::from_bitstring(n, s));
        if (predicted != strict.contains(s)) diff = fmt::format("{} predicted={} strict={}", s, predicted, !predicted);
      }
      out.push_back(make_check(label + " strict shape conditions match strict equilibria", diff.empty(), diff));
    }
  }
  return out;
}

std::vector<CheckResult> verify_production_instance(const ProductionGameConfig& cfg, const std::string& label,
                                                    const ProductionEnumOptions& opts) {
  std::vector<CheckResult> out;
  const int n = cfg.n_agents;
  if (n > kProductionFullScanAgents) {
    throw CapExceeded(fmt::format("production verification scans at most {} agents", kProductionFullScanAgents));
  }
  const auto ne = enumerate_production_ne(cfg, opts);
  std::set<std::string> found;
  for (const auto& s : ne) found.insert(to_text(s));

  const auto levels = cfg.grid();
  const int bits = n * (n - 1);
  std::size_t combos = 1;
  for (int i = 0; i < n; ++i) combos *= levels.size();
  std::string diff;
  std::string bitstring(bits, '0');
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits) && diff.empty(); ++code) {
    for (int b = 0; b < bits; ++b) bitstring[b] = ((code >> (bits - 1 - b)) & 1U) ? '1' : '0';
    ProductionProfile s{std::vector<double>(n), LinkProfile::from_bitstring(n, bitstring)};
    for (std::size_t combo = 0; combo < combos && diff.empty(); ++combo) {
      std::size_t rest = combo;
      for (int i = n - 1; i >= 0; --i) {
        s.production[i] = levels[rest % levels.size()];
        rest /= levels.size();
      }
      const bool predicted = check_production_structure(cfg, s);
      const bool is_ne = found.contains(to_text(s));
      if (predicted != is_ne) diff = fmt::format("{} predicted={} equilibrium={}", to_text(s), predicted, is_ne);
    }
  }
  out.push_back(make_check(label + " structure conditions match grid equilibria", diff.empty(), diff));

  if (!cfg.low_cost()) {
    const bool unique = ne.size() == 1 && ne.front().links.link_count() == 0 &&
                        std::all_of(ne.front().production.begin(), ne.front().production.end(),
                                    [&](double x) { return std::abs(x - cfg.h_bar) <= kTolerance; });
    out.push_back(make_check(label + " high cost: unique isolated equilibrium at h_bar", unique,
                             fmt::format("{} equilibria", ne.size())));
  } else if (cfg.agg == Aggregation::kSum) {
    std::string why;
    for (const auto& s : ne) {
      const double total = aggregate(cfg.agg, s.production, full_set(n));
      if ((components(s.links).size() != 1 || std::abs(total - cfg.h_bar) > cfg.delta / 2) && why.empty()) {
        why = to_text(s);
      }
    }
    out.push_back(make_check(label + " low cost: connected with total h_bar", why.empty(), why));
  } else {
    std::string why;
    for (const auto& s : ne) {
      if (few_metrics(cfg, s).producer_fraction * n != 1.0 && why.empty()) why = to_text(s);
    }
    out.push_back(make_check(label + " low cost: exactly one producer", why.empty(), why));
  }
  return out;
}

JointPmf random_pmf(std::mt19937_64& rng, int n_agents) {
  std::uniform_int_distribution<int> alphabet(2, 3);
  std::exponential_distribution<double> weight(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> sizes;
  std::size_t cells = 1;
  for (int i = 0; i < n_agents; ++i) {
    sizes.push_back(alphabet(rng));
    cells *= sizes.back();
  }
  std::vector<double> p(cells);
  double total = 0.0;
  for (auto& x : p) {
    x = unit(rng) < 0.25 ? 0.0 : weight(rng);
    total += x;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    total = 1.0;
  }
  for (auto& x : p) x /= total;
  return JointPmf(std::move(sizes), std::move(p));
}

GameConfig random_game(std::mt19937_64& rng, int n_agents, CostModel::Kind kind, const BenefitFunction& f) {
  // Redraw when every agent already knows everything: the cost range would
  // collapse to zero and every profile would tie.
  EntropicVector ev = from_joint_pmf(random_pmf(rng, n_agents));
  double c_u = n_agents >= 2 ? thresholds_homogeneous(ev, f).c_u : 1.0;
  while (c_u <= kTolerance) {
    ev = from_joint_pmf(random_pmf(rng, n_agents));
    c_u = thresholds_homogeneous(ev, f).c_u;
  }
  std::uniform_real_distribution<double> cost(0.0, 2.0 * c_u);
  switch (kind) {
    case CostModel::Kind::kHomogeneous:
      return GameConfig(std::move(ev), f, CostModel::homogeneous(cost(rng)));
    case CostModel::Kind::kRecipientDependent: {
      std::vector<double> c(n_agents);
      for (auto& x : c) x = cost(rng);
      return GameConfig(std::move(ev), f, CostModel::recipient_dependent(std::move(c)));
    }
    case CostModel::Kind::kGeneral: {
      std::vector<std::vector<double>> m(n_agents, std::vector<double>(n_agents, 0.0));
      for (int i = 0; i < n_agents; ++i) {
        for (int j = 0; j < n_agents; ++j) {
          if (i != j) m[i][j] = cost(rng);
        }
      }
      return GameConfig(std::move(ev), f, CostModel::general(std::move(m)));
    }
  }
  throw std::logic_error("unreachable");
}

VerifyResult run_verify(const ExperimentSpec& spec, const RunOptions& opts) {
  std::vector<CheckResult> checks;
  const auto eo = enum_options(opts);
  const auto& doc = spec.doc;

  const bool has_game = doc.has("entropy.h") || doc.has("entropy.values") || doc.has("entropy.file");
  if (has_game) {
    const GameConfig base = game_from_spec(spec);
    std::vector<std::pair<std::string, GameConfig>> instances;
    if (doc.has("grid.c") && base.costs.kind() == CostModel::Kind::kHomogeneous) {
      for (double c : spec_guard([&] { return parse_grid(doc.require("grid.c")); })) {
        instances.emplace_back(fmt::format("spec c={}", number(c)), GameConfig(base.ev, base.f, CostModel::homogeneous(c)));
      }
    } else {
      instances.emplace_back("spec", base);
    }
    for (const auto& [label, cfg] : instances) {
      auto more = verify_formation_instance(cfg, label, eo);
      checks.insert(checks.end(), more.begin(), more.end());
    }
  }

  const long long count = spec_guard([&] { return doc.get_int("verify.random_instances", 50); });
  const long long max_agents = spec_guard([&] { return doc.get_int("verify.random_agents", 4); });
  if (count < 0 || max_agents < 2) throw SpecError("verify.random_instances >= 0 and verify.random_agents >= 2 required");
  std::mt19937_64 rng(effective_seed(spec, opts));
  const BenefitFunction f = spec_guard([&] { return benefit_from_spec(doc); });
  for (long long r = 0; r < count; ++r) {
    const int n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_agents - 1));
    const auto kind = r % 3 == 2 ? CostModel::Kind::kRecipientDependent : CostModel::Kind::kHomogeneous;
    const GameConfig cfg = random_game(rng, n, kind, f);
    auto more = verify_formation_instance(
        cfg, fmt::format("random#{} n={} {}", r, n, kind == CostModel::Kind::kHomogeneous ? "homogeneous" : "recipient"),
        eo);
    checks.insert(checks.end(), more.begin(), more.end());
  }

  if (doc.has("production.k")) {
    const ProductionGameConfig base = production_from_spec(spec);
    const auto po = production_options(opts);
    for (Aggregation agg : {Aggregation::kSum, Aggregation::kMax}) {
      for (int n = 2; n <= kProductionFullScanAgents; ++n) {
        const auto cfg = ProductionGameConfig::make(n, base.f, base.k, base.c, agg, base.delta);
        auto more = verify_production_instance(
            cfg, fmt::format("production {} n={} c={}", aggregation_name(agg), n, number(cfg.c)), po);
        checks.insert(checks.end(), more.begin(), more.end());
      }
    }
    if (doc.has("few.n")) {
      for (Aggregation agg : {Aggregation::kSum, Aggregation::kMax}) {
        const auto cfg = ProductionGameConfig::make(base.n_agents, base.f, base.k, base.c, agg, base.delta);
        std::vector<int> ns;
        for (double x : spec_guard([&] { return doc.get_doubles("few.n"); })) ns.push_back(static_cast<int>(x));
        std::vector<FewRow> rows;
        std::string error;
        try {
          rows = few_sweep(cfg, ns, po);
        } catch (const std::logic_error& e) {
          error = e.what();
        }
        std::string why = error;
        for (const auto& r : rows) {
          double fraction = 1.0;
          double total = agg == Aggregation::kSum ? r.n * r.h_bar : r.h_bar;
          if (cfg.low_cost()) {
            fraction = agg == Aggregation::kSum ? 1.0 : 1.0 / r.n;
            total = r.h_bar;
          }
          if ((std::abs(r.producer_fraction - fraction) > 1e-12 || std::abs(r.total_information - total) > 1e-9) &&
              why.empty()) {
            why = fmt::format("n={} fraction={} total={}", r.n, number(r.producer_fraction), number(r.total_information));
          }
        }
        checks.push_back(make_check(fmt::format("few-sweep {} series", aggregation_name(agg)), why.empty(), why));
      }
    }
  }

  std::string report = header(spec, "verify", opts);
  int failed = 0;
  for (const auto& c : checks) {
    failed += !c.passed;
    report += c.passed ? fmt::format("PASS {}\n", c.name)
                       : fmt::format("FAIL {}{}\n", c.name, c.detail.empty() ? "" : ": " + c.detail);
  }
  report += fmt::format("summary: {} passed, {} failed\n", checks.size() - failed, failed);
  return {failed == 0, report};
}

}  // namespace cin
