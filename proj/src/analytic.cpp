#include "cin/analytic.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace cin {

namespace {

double min_over(AgentSet members, const std::vector<double>& c) {
  double m = std::numeric_limits<double>::infinity();
  for (; members; members &= members - 1) m = std::min(m, c[std::countr_zero(members)]);
  return m;
}

// Agent whose complement carries the least information; first on ties.
int argmin_complement(const EntropicVector& ev) {
  const AgentSet all = ev.all();
  int best = 0;
  for (int i = 1; i < ev.n_agents(); ++i) {
    if (ev(all & ~singleton(i)) < ev(all & ~singleton(best))) best = i;
  }
  return best;
}

void require_pair(int n) {
  if (n < 2) throw std::invalid_argument("connectivity regions need at least two agents");
}

void validate_partition(const Partition& part, int n) {
  AgentSet seen = 0;
  for (AgentSet block : part) {
    if (block == 0 || (block & seen) || (block & ~full_set(n))) {
      throw std::invalid_argument("blocks must be nonempty, disjoint and within the agent set");
    }
    seen |= block;
  }
  if (seen != full_set(n)) throw std::invalid_argument("partition does not cover every agent");
}

bool homogeneous_conditions(const GameConfig& cfg, const Partition& part, double tol) {
  const auto& f = cfg.f;
  const auto& ev = cfg.ev;
  const double c = cfg.costs.homogeneous_cost();
  for (AgentSet block : part) {
    if (std::popcount(block) < 2) continue;
    const double whole = f(ev(block));
    for (AgentSet m = block; m; m &= m - 1) {
      const int j = std::countr_zero(m);
      const double gain = whole - std::min(f(ev(block & ~singleton(j))), f(ev(singleton(j))));
      if (gain < c - tol) return false;
    }
  }
  for (AgentSet a : part) {
    for (AgentSet b : part) {
      if (a != b && f(ev(a | b)) - f(ev(a)) > c + tol) return false;
    }
  }
  return true;
}

bool recipient_conditions(const GameConfig& cfg, const Partition& part, double tol) {
  const auto& f = cfg.f;
  const auto& ev = cfg.ev;
  const std::vector<double> c = cfg.costs.recipient_costs(cfg.n_agents());
  for (AgentSet a : part) {
    for (AgentSet b : part) {
      // A cross link pays the cheapest recipient in the other component.
      if (a != b && f(ev(a | b)) - f(ev(a)) > min_over(b, c) + tol) return false;
    }
  }
  for (AgentSet block : part) {
    if (std::popcount(block) < 2) continue;
    const double whole = f(ev(block));
    for (AgentSet m = block; m; m &= m - 1) {
      const int j = std::countr_zero(m);
      const AgentSet rest = block & ~singleton(j);
      const double need = std::min(f(ev(rest)) + c[j], f(ev(singleton(j))) + min_over(rest, c));
      if (whole < need - tol) return false;
    }
  }
  return true;
}

Prediction mixed_poa_bound(const GameConfig& cfg, Region r) {
  const int n = cfg.n_agents();
  double isolated = 0.0;
  for (int i = 0; i < n; ++i) isolated += cfg.f(cfg.ev(singleton(i)));
  return {n * cfg.f(cfg.ev.joint()) / isolated, true, r};
}

}  // namespace

std::string_view region_label(Region r) {
  switch (r) {
    case Region::kConnected: return "K_C";
    case Region::kIsolated: return "K_I";
    case Region::kMixed: return "K_M";
  }
  return "?";
}

Thresholds thresholds_homogeneous(const EntropicVector& ev, const BenefitFunction& f) {
  const int n = ev.n_agents();
  require_pair(n);
  const AgentSet all = ev.all();
  double min_rest = std::numeric_limits<double>::infinity();
  double min_own = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    min_rest = std::min(min_rest, ev(all & ~singleton(i)));
    min_own = std::min(min_own, ev(singleton(i)));
  }
  const double top = f(ev.joint());
  return {top - f(min_rest), top - f(min_own)};
}

Region region_homogeneous(const Thresholds& t, double c) {
  if (c <= t.c_l) return Region::kConnected;
  if (c >= t.c_u) return Region::kIsolated;
  return Region::kMixed;
}

Region region_heterogeneous(const EntropicVector& ev, const BenefitFunction& f, const CostModel& costs,
                            KcRule rule) {
  if (costs.kind() != CostModel::Kind::kRecipientDependent) {
    throw std::invalid_argument("recipient-dependent costs required");
  }
  const int n = ev.n_agents();
  require_pair(n);
  const auto c = costs.recipient_costs(n);
  const AgentSet all = ev.all();
  const double top = f(ev.joint());
  const int pivot = argmin_complement(ev);

  bool connected = true;
  for (int i = 0; i < n; ++i) {
    if (rule == KcRule::kArgminAgent && i != pivot) continue;
    if (!(c[i] < top - f(ev(all & ~singleton(i))))) connected = false;
  }
  if (connected) return Region::kConnected;

  const double cheapest_other = min_over(all & ~singleton(pivot), c);
  if (top - f(ev(all & ~singleton(pivot))) < cheapest_other) return Region::kIsolated;
  return Region::kMixed;
}

Region classify(const GameConfig& cfg, KcRule rule) {
  switch (cfg.costs.kind()) {
    case CostModel::Kind::kHomogeneous:
      return region_homogeneous(thresholds_homogeneous(cfg.ev, cfg.f), cfg.costs.homogeneous_cost());
    case CostModel::Kind::kRecipientDependent:
      return region_heterogeneous(cfg.ev, cfg.f, cfg.costs, rule);
    case CostModel::Kind::kGeneral:
      break;
  }
  throw std::invalid_argument("no closed-form region for a general cost matrix");
}

std::vector<Partition> all_partitions(int n) {
  if (n < 1 || n > kMaxAgents) throw std::invalid_argument("agent count out of range");
  // Restricted growth strings: label[i] <= 1 + max(label[0..i-1]).
  std::vector<Partition> out;
  std::vector<int> label(n, 0);
  while (true) {
    const int blocks = *std::max_element(label.begin(), label.end()) + 1;
    Partition p(blocks, 0);
    for (int i = 0; i < n; ++i) p[label[i]] |= singleton(i);
    out.push_back(std::move(p));

    int i = n - 1;
    for (; i > 0; --i) {
      const int prefix_max = *std::max_element(label.begin(), label.begin() + i);
      if (label[i] <= prefix_max) break;
    }
    if (i == 0) break;
    ++label[i];
    std::fill(label.begin() + i + 1, label.end(), 0);
  }
  return out;
}

Partition canonical(Partition p) {
  std::sort(p.begin(), p.end(), [](AgentSet a, AgentSet b) { return std::countr_zero(a) < std::countr_zero(b); });
  return p;
}

bool check_component_structure_ne(const GameConfig& cfg, const Partition& part, double tolerance) {
  validate_partition(part, cfg.n_agents());
  switch (cfg.costs.kind()) {
    case CostModel::Kind::kHomogeneous: return homogeneous_conditions(cfg, part, tolerance);
    case CostModel::Kind::kRecipientDependent: return recipient_conditions(cfg, part, tolerance);
    case CostModel::Kind::kGeneral: break;
  }
  throw std::invalid_argument("no closed-form conditions for a general cost matrix");
}

bool check_strict_ne_structure(const GameConfig& cfg, const LinkProfile& p, double tolerance) {
  if (cfg.costs.kind() != CostModel::Kind::kHomogeneous) {
    throw std::invalid_argument("strict-equilibrium shape test needs homogeneous costs");
  }
  if (p.n_agents() != cfg.n_agents()) throw std::invalid_argument("profile size mismatch");
  const Partition part = components(p);
  if (!homogeneous_conditions(cfg, part, tolerance)) return false;

  const double c = cfg.costs.homogeneous_cost();
  for (AgentSet block : part) {
    if (std::popcount(block) < 2) continue;
    // The core sponsors a link to every other member; nobody else links.
    int core = -1;
    for (AgentSet m = block; m; m &= m - 1) {
      const int j = std::countr_zero(m);
      if (core < 0 && p.row(j) == (block & ~singleton(j))) {
        core = j;
      } else if (p.row(j) != 0) {
        return false;
      }
    }
    if (core < 0) return false;
    const double whole = cfg.f(cfg.ev(block));
    int zeta = 0;
    bool periphery_in_zeta = true;
    for (AgentSet m = block; m; m &= m - 1) {
      const int j = std::countr_zero(m);
      const bool high = whole - cfg.f(cfg.ev(block & ~singleton(j))) - c > tolerance;
      zeta += high;
      if (j != core && !high) periphery_in_zeta = false;
    }
    if (!periphery_in_zeta || zeta < std::popcount(block) - 1) return false;
  }
  return true;
}

double poa_recipient_connected(const EntropicVector& ev, const BenefitFunction& f,
                               std::span<const double> costs) {
  const int n = ev.n_agents();
  if (static_cast<int>(costs.size()) != n) throw std::invalid_argument("one cost per agent required");
  const double total = n * f(ev.joint());
  const double cheapest = *std::min_element(costs.begin(), costs.end());
  const double sum = std::accumulate(costs.begin(), costs.end(), 0.0);
  return (total - (n - 1) * cheapest) / (total - sum + cheapest);
}

Prediction poa_predict(const GameConfig& cfg, KcRule rule) {
  const Region r = classify(cfg, rule);
  if (r == Region::kMixed) return mixed_poa_bound(cfg, r);
  if (r == Region::kConnected && cfg.costs.kind() == CostModel::Kind::kRecipientDependent) {
    const auto c = cfg.costs.recipient_costs(cfg.n_agents());
    return {poa_recipient_connected(cfg.ev, cfg.f, c), false, r};
  }
  return {1.0, false, r};
}

Prediction mil_predict(const GameConfig& cfg, KcRule rule) {
  const Region r = classify(cfg, rule);
  if (r != Region::kMixed) return {0.0, false, r};
  double least = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.n_agents(); ++i) least = std::min(least, cfg.ev(singleton(i)));
  return {cfg.ev.joint() - least, true, r};
}

std::vector<double> poa_monotonicity_sweep(double h1, double h2, double h3, const BenefitFunction& f,
                                           std::span<const double> costs,
                                           std::span<const double> kl_grid, KcRule rule) {
  const auto model = CostModel::recipient_dependent({costs.begin(), costs.end()});
  std::vector<double> out;
  for (double kl : kl_grid) {
    const auto ev = family_example1(h1, h2, h3, kl);
    if (region_heterogeneous(ev, f, model, rule) != Region::kConnected) {
      throw std::domain_error(fmt::format("kl = {} leaves the connected region", kl));
    }
    out.push_back(poa_recipient_connected(ev, f, costs));
  }
  return out;
}

std::vector<RegionRow> region_sweep(double h1, double h2, double h3, const BenefitFunction& f,
                                    std::span<const double> c_grid, std::span<const double> kl_grid) {
  std::vector<RegionRow> rows;
  for (double kl : kl_grid) {
    const auto ev = family_example1(h1, h2, h3, kl);
    const Thresholds t = thresholds_homogeneous(ev, f);
    for (double c : c_grid) {
      const GameConfig cfg(ev, f, CostModel::homogeneous(c));
      rows.push_back({c, kl, region_homogeneous(t, c), t, poa_predict(cfg), mil_predict(cfg)});
    }
  }
  return rows;
}

void write_region_csv(std::ostream& out, std::span<const RegionRow> rows) {
  out << "c,kl,region,c_l,c_u,poa_or_bound,mil_or_bound\n";
  for (const auto& r : rows) {
    out << fmt::format("{:.12g},{:.12g},{},{:.12g},{:.12g},{:.12g},{:.12g}\n", r.c, r.kl, region_label(r.region),
                       r.thresholds.c_l, r.thresholds.c_u, r.poa.value, r.mil.value);
  }
}

}  // namespace cin
