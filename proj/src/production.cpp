#include "cin/production.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace cin {

namespace {

constexpr double kProducerThreshold = 1e-12;

using ComponentMap = std::array<AgentSet, kMaxAgents>;

ComponentMap components_without(const LinkProfile& p, int skip) {
  const int n = p.n_agents();
  std::array<AgentSet, kMaxAgents> adj{};
  for (int a = 0; a < n; ++a) {
    if (a == skip) continue;
    for (AgentSet r = p.row(a); r; r &= r - 1) {
      const int b = std::countr_zero(r);
      adj[a] |= singleton(b);
      adj[b] |= singleton(a);
    }
  }
  ComponentMap comp{};
  for (int a = 0; a < n; ++a) {
    if (comp[a]) continue;
    AgentSet seen = singleton(a);
    AgentSet frontier = seen;
    while (frontier) {
      AgentSet next = 0;
      for (AgentSet f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
      frontier = next & ~seen;
      seen |= next;
    }
    for (AgentSet s = seen; s; s &= s - 1) comp[std::countr_zero(s)] = seen;
  }
  return comp;
}

AgentSet component_of(const LinkProfile& p, int i) { return reachable_set(p, i) | singleton(i); }

double combine(Aggregation agg, double own, double acquired) {
  return agg == Aggregation::kSum ? own + acquired : std::max(own, acquired);
}

double exact_best_production(const ProductionGameConfig& cfg, double acquired) {
  if (cfg.agg == Aggregation::kSum) return std::max(0.0, cfg.h_bar - acquired);
  return acquired >= cfg.h_bar ? 0.0 : cfg.h_bar;
}

void check_agents(const ProductionGameConfig& cfg, const ProductionProfile& s) {
  if (s.links.n_agents() != cfg.n_agents || static_cast<int>(s.production.size()) != cfg.n_agents) {
    throw std::invalid_argument("production profile size mismatch");
  }
}

bool high_cost_shape(const ProductionGameConfig& cfg, const ProductionProfile& s, double tol) {
  if (s.links.link_count() != 0) return false;
  return std::all_of(s.production.begin(), s.production.end(),
                     [&](double x) { return std::abs(x - cfg.h_bar) <= tol; });
}

bool minimally_connected(const LinkProfile& p) {
  const auto comps = components(p);
  return comps.size() == 1 && p.link_count() == p.n_agents() - 1;
}

// Compositions of `units` into n nonnegative parts, lexicographic.
void compositions(int units, int n, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == n - 1) {
    cur.push_back(units);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int u = 0; u <= units; ++u) {
    cur.push_back(u);
    compositions(units - u, n, cur, out);
    cur.pop_back();
  }
}

// Labeled trees on n vertices as undirected edge lists, from Pruefer codes.
std::vector<std::vector<std::pair<int, int>>> labeled_trees(int n) {
  std::vector<std::vector<std::pair<int, int>>> out;
  if (n == 1) {
    out.emplace_back();
    return out;
  }
  if (n == 2) {
    out.push_back({{0, 1}});
    return out;
  }
  const int len = n - 2;
  std::vector<int> code(len, 0);
  while (true) {
    std::vector<int> degree(n, 1);
    for (int v : code) ++degree[v];
    std::vector<std::pair<int, int>> edges;
    for (int v : code) {
      int leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      edges.emplace_back(std::min(leaf, v), std::max(leaf, v));
      --degree[leaf];
      --degree[v];
    }
    int u = -1;
    for (int v = 0; v < n; ++v) {
      if (degree[v] == 1) {
        if (u < 0) {
          u = v;
        } else {
          edges.emplace_back(u, v);
        }
      }
    }
    out.push_back(std::move(edges));
    int pos = len - 1;
    while (pos >= 0 && code[pos] == n - 1) code[pos--] = 0;
    if (pos < 0) break;
    ++code[pos];
  }
  return out;
}

// Orients every tree edge toward `root`.
LinkProfile toward(int n, const std::vector<std::pair<int, int>>& edges, int root) {
  std::vector<AgentSet> adj(n, 0);
  for (auto [a, b] : edges) {
    adj[a] |= singleton(b);
    adj[b] |= singleton(a);
  }
  LinkProfile p(n);
  std::vector<int> stack{root};
  AgentSet seen = singleton(root);
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (AgentSet r = adj[v] & ~seen; r; r &= r - 1) {
      const int w = std::countr_zero(r);
      p.set_link(w, v, true);
      seen |= singleton(w);
      stack.push_back(w);
    }
  }
  return p;
}

bool profile_less(const ProductionProfile& a, const ProductionProfile& b) {
  const auto ba = a.links.bitstring();
  const auto bb = b.links.bitstring();
  if (ba != bb) return ba < bb;
  return a.production < b.production;
}

void check_cap(int n, const ProductionEnumOptions& opts) {
  if (n > opts.max_agents) {
    throw CapExceeded(fmt::format("{} agents exceeds the production enumeration cap of {}", n, opts.max_agents));
  }
}

std::vector<ProductionProfile> full_scan(const ProductionGameConfig& cfg, const ProductionEnumOptions& opts) {
  const int n = cfg.n_agents;
  const auto levels = cfg.grid();
  const int bits = n * (n - 1);
  const std::uint64_t link_count = std::uint64_t{1} << bits;
  std::size_t level_combos = 1;
  for (int i = 0; i < n; ++i) level_combos *= levels.size();

  const unsigned workers = std::max(1U, std::min<unsigned>(opts.threads, static_cast<unsigned>(link_count)));
  std::vector<std::vector<ProductionProfile>> parts(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        std::string s(bits, '0');
        for (std::uint64_t code = link_count * w / workers; code < link_count * (w + 1) / workers; ++code) {
          for (int b = 0; b < bits; ++b) s[b] = ((code >> (bits - 1 - b)) & 1U) ? '1' : '0';
          ProductionProfile prof{std::vector<double>(n, 0.0), LinkProfile::from_bitstring(n, s)};
          for (std::size_t combo = 0; combo < level_combos; ++combo) {
            std::size_t rest = combo;
            for (int i = n - 1; i >= 0; --i) {
              prof.production[i] = levels[rest % levels.size()];
              rest /= levels.size();
            }
            if (is_production_ne(cfg, prof, opts.tolerance)) parts[w].push_back(prof);
          }
        }
      });
    }
  }
  std::vector<ProductionProfile> out;
  for (auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

std::vector<ProductionProfile> candidates(const ProductionGameConfig& cfg) {
  const int n = cfg.n_agents;
  std::vector<ProductionProfile> out;
  out.push_back({std::vector<double>(n, cfg.h_bar), LinkProfile(n)});
  const auto trees = labeled_trees(n);
  if (cfg.agg == Aggregation::kMax) {
    for (const auto& t : trees) {
      for (int root = 0; root < n; ++root) {
        std::vector<double> prod(n, 0.0);
        prod[root] = cfg.h_bar;
        out.push_back({prod, toward(n, t, root)});
      }
    }
    return out;
  }
  const int units = std::max(1, static_cast<int>(std::lround(cfg.h_bar / cfg.delta)));
  std::vector<std::vector<int>> splits;
  std::vector<int> cur;
  compositions(units, n, cur, splits);
  for (const auto& t : trees) {
    for (std::uint32_t orient = 0; orient < (std::uint32_t{1} << t.size()); ++orient) {
      LinkProfile p(n);
      for (std::size_t e = 0; e < t.size(); ++e) {
        const auto [a, b] = t[e];
        if ((orient >> e) & 1U) {
          p.set_link(b, a, true);
        } else {
          p.set_link(a, b, true);
        }
      }
      for (const auto& split : splits) {
        std::vector<double> prod(n);
        for (int i = 0; i < n; ++i) prod[i] = cfg.h_bar * split[i] / units;
        out.push_back({std::move(prod), p});
      }
    }
  }
  return out;
}

}  // namespace

std::string_view aggregation_name(Aggregation a) { return a == Aggregation::kSum ? "sum" : "max"; }

Aggregation aggregation_from_name(std::string_view name) {
  if (name == "sum") return Aggregation::kSum;
  if (name == "max") return Aggregation::kMax;
  throw std::invalid_argument(fmt::format("unknown aggregation '{}'", name));
}

double h_bar(const BenefitFunction& f, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("production cost k must be positive");
  if (k >= f.derivative(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (f.derivative(hi) > k) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e18) throw std::domain_error(fmt::format("{}: marginal benefit never falls to {}", f.name(), k));
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f.derivative(mid) > k ? lo : hi) = mid;
  }
  return std::abs(f.derivative(lo) - k) < std::abs(f.derivative(hi) - k) ? lo : hi;
}

ProductionGameConfig ProductionGameConfig::make(int n_agents, BenefitFunction f, double k, double c,
                                                Aggregation agg, double delta) {
  if (n_agents < 1 || n_agents > kMaxAgents) throw std::invalid_argument("agent count out of range");
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("link cost must be nonnegative");
  const double hb = cin::h_bar(f, k);
  if (delta == 0.0) delta = hb > 0.0 ? hb / 6.0 : 1.0;
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("grid step must be positive");
  return {n_agents, std::move(f), k, c, agg, delta, hb};
}

std::vector<double> ProductionGameConfig::grid() const {
  std::vector<double> levels;
  if (h_bar <= 0.0) return {0.0};
  const auto steps = static_cast<long>(std::ceil(h_bar / delta - 1e-9));
  for (long s = 0; s <= steps; ++s) levels.push_back(s * delta);
  levels.push_back(h_bar);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }),
               levels.end());
  return levels;
}

std::string to_text(const ProductionProfile& s) {
  std::string out = s.links.bitstring();
  for (double x : s.production) out += fmt::format(",{:.12g}", x);
  return out;
}

ProductionProfile production_profile_from_text(int n_agents, std::string_view text) {
  std::vector<std::string> fields;
  std::stringstream ss{std::string(text)};
  for (std::string field; std::getline(ss, field, ',');) fields.push_back(field);
  if (static_cast<int>(fields.size()) != n_agents + 1) {
    throw std::invalid_argument("expected a bitstring and one production level per agent");
  }
  ProductionProfile s{{}, LinkProfile::from_bitstring(n_agents, fields[0])};
  for (int i = 0; i < n_agents; ++i) {
    std::size_t used = 0;
    const double x = std::stod(fields[i + 1], &used);
    if (used != fields[i + 1].size() || !(x >= 0.0)) throw std::invalid_argument("bad production level");
    s.production.push_back(x);
  }
  return s;
}

double aggregate(Aggregation agg, std::span<const double> production, AgentSet members) {
  double acc = 0.0;
  for (; members; members &= members - 1) {
    const double x = production[std::countr_zero(members)];
    acc = agg == Aggregation::kSum ? acc + x : std::max(acc, x);
  }
  return acc;
}

double production_utility(const ProductionGameConfig& cfg, const ProductionProfile& s, int i) {
  check_agents(cfg, s);
  const double info = aggregate(cfg.agg, s.production, component_of(s.links, i));
  return cfg.f(info) - cfg.k * s.production[i] - std::popcount(s.links.row(i)) * cfg.c;
}

bool is_production_ne(const ProductionGameConfig& cfg, const ProductionProfile& s, double tolerance) {
  check_agents(cfg, s);
  const int n = cfg.n_agents;
  if (n > kProductionCheckAgents) {
    throw CapExceeded(fmt::format("{} agents exceeds the deviation-check cap of {}", n, kProductionCheckAgents));
  }
  const auto levels = cfg.grid();
  for (int i = 0; i < n; ++i) {
    const double current = production_utility(cfg, s, i);
    const ComponentMap comp = components_without(s.links, i);
    for (AgentSet row : rows_in_bitstring_order(n, i)) {
      AgentSet reach = comp[i];
      for (AgentSet r = row; r; r &= r - 1) reach |= comp[std::countr_zero(r)];
      const double acquired = aggregate(cfg.agg, s.production, reach & ~singleton(i));
      const double link_cost = std::popcount(row) * cfg.c;
      auto gains = [&](double x) {
        return cfg.f(combine(cfg.agg, x, acquired)) - cfg.k * x - link_cost > current + tolerance;
      };
      if (gains(exact_best_production(cfg, acquired))) return false;
      for (double x : levels) {
        if (gains(x)) return false;
      }
    }
  }
  return true;
}

bool check_sum_structure(const ProductionGameConfig& cfg, const ProductionProfile& s, double tolerance) {
  check_agents(cfg, s);
  if (cfg.agg != Aggregation::kSum) throw std::invalid_argument("sum aggregation required");
  if (!cfg.low_cost()) return high_cost_shape(cfg, s, tolerance);
  if (!minimally_connected(s.links)) return false;
  const double total = aggregate(cfg.agg, s.production, full_set(cfg.n_agents));
  if (std::abs(total - cfg.h_bar) > tolerance) return false;
  // Each sponsored link must carry at least c/k bits that the sponsor loses
  // without it.
  for (int i = 0; i < cfg.n_agents; ++i) {
    for (AgentSet r = s.links.row(i); r; r &= r - 1) {
      LinkProfile cut = s.links;
      cut.set_link(i, std::countr_zero(r), false);
      const double kept = aggregate(cfg.agg, s.production, component_of(cut, i));
      if (cfg.c > cfg.k * (total - kept) + tolerance) return false;
    }
  }
  return true;
}

bool check_max_structure(const ProductionGameConfig& cfg, const ProductionProfile& s, double tolerance) {
  check_agents(cfg, s);
  if (cfg.agg != Aggregation::kMax) throw std::invalid_argument("max aggregation required");
  if (!cfg.low_cost()) return high_cost_shape(cfg, s, tolerance);
  if (!minimally_connected(s.links)) return false;
  int producers = 0;
  for (int i = 0; i < cfg.n_agents; ++i) {
    const double x = s.production[i];
    if (std::abs(x - cfg.h_bar) <= tolerance) {
      ++producers;
    } else if (std::abs(x) > tolerance) {
      return false;
    } else if (std::popcount(s.links.row(i)) != 1) {
      return false;
    }
  }
  return producers == 1;
}

bool check_production_structure(const ProductionGameConfig& cfg, const ProductionProfile& s, double tolerance) {
  return cfg.agg == Aggregation::kSum ? check_sum_structure(cfg, s, tolerance)
                                      : check_max_structure(cfg, s, tolerance);
}

std::vector<ProductionProfile> enumerate_production_ne(const ProductionGameConfig& cfg,
                                                       const ProductionEnumOptions& opts) {
  check_cap(cfg.n_agents, opts);
  std::vector<ProductionProfile> out;
  if (cfg.n_agents <= kProductionFullScanAgents) {
    out = full_scan(cfg, opts);
  } else {
    for (auto& cand : candidates(cfg)) {
      if (is_production_ne(cfg, cand, opts.tolerance)) out.push_back(std::move(cand));
    }
  }
  std::sort(out.begin(), out.end(), profile_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FewMetrics few_metrics(const ProductionGameConfig& cfg, const ProductionProfile& s) {
  check_agents(cfg, s);
  const auto producers = std::count_if(s.production.begin(), s.production.end(),
                                       [](double x) { return x > kProducerThreshold; });
  return {static_cast<double>(producers) / cfg.n_agents, aggregate(cfg.agg, s.production, full_set(cfg.n_agents))};
}

std::vector<FewRow> few_sweep(const ProductionGameConfig& base, std::span<const int> n_list,
                              const ProductionEnumOptions& opts) {
  std::vector<FewRow> rows;
  for (int n : n_list) {
    auto cfg = ProductionGameConfig::make(n, base.f, base.k, base.c, base.agg, base.delta);
    std::vector<ProductionProfile> found;
    if (!cfg.low_cost()) {
      found.push_back({std::vector<double>(n, cfg.h_bar), LinkProfile(n)});
    } else {
      // Periphery-sponsored star around agent 0.
      LinkProfile star(n);
      for (int j = 1; j < n; ++j) star.set_link(j, 0, true);
      std::vector<double> prod(n, 0.0);
      if (cfg.agg == Aggregation::kMax) {
        prod[0] = cfg.h_bar;
      } else {
        std::fill(prod.begin(), prod.end(), cfg.h_bar / n);
      }
      found.push_back({prod, star});
    }
    if (!is_production_ne(cfg, found.front(), opts.tolerance)) {
      throw std::logic_error(fmt::format("witness {} is not an equilibrium for n = {}", to_text(found.front()), n));
    }
    if (n <= kProductionFullScanAgents) {
      auto more = enumerate_production_ne(cfg, opts);
      found.insert(found.end(), more.begin(), more.end());
    }
    FewMetrics best{-1.0, 0.0};
    for (const auto& s : found) {
      const FewMetrics m = few_metrics(cfg, s);
      if (m.producer_fraction > best.producer_fraction + kProducerThreshold) best = m;
    }
    rows.push_back({n, cfg.agg, cfg.c, cfg.k, cfg.h_bar, best.producer_fraction, best.total_information});
  }
  return rows;
}

void write_few_csv(std::ostream& out, std::span<const FewRow> rows) {
  out << "n,agg,c,k,h_bar,producer_fraction,total_information_bits\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\n", r.n, aggregation_name(r.agg), r.c, r.k,
                       r.h_bar, r.producer_fraction, r.total_information);
  }
}

}  // namespace cin
