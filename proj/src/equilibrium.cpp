#include "cin/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <ostream>
#include <thread>

#include <fmt/format.h>

namespace cin {

namespace {

// Cached f(H(S)) for every subset and the cost matrix, so that deviation
// scans reduce to table lookups.
class PayoffTables {
 public:
  explicit PayoffTables(const GameConfig& cfg) : n_(cfg.n_agents()) {
    benefit_.resize(std::size_t{1} << n_);
    for (AgentSet s = 0; s < benefit_.size(); ++s) benefit_[s] = cfg.f(cfg.ev(s));
    cost_.resize(n_ * n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) cost_[i * n_ + j] = i == j ? 0.0 : cfg.cost(i, j);
    }
  }

  int n() const { return n_; }
  double benefit(AgentSet s) const { return benefit_[s]; }
  double cost(int i, int j) const { return cost_[i * n_ + j]; }

  double row_cost(int i, AgentSet row) const {
    double c = 0.0;
    for (; row; row &= row - 1) c += cost(i, std::countr_zero(row));
    return c;
  }

 private:
  int n_;
  std::vector<double> benefit_;
  std::vector<double> cost_;
};

using ComponentMap = std::array<AgentSet, kMaxAgents>;

// Component of every agent in the graph formed by all links except those
// sponsored by `skip`.
ComponentMap components_without(const std::vector<AgentSet>& rows, int skip) {
  const int n = static_cast<int>(rows.size());
  std::array<AgentSet, kMaxAgents> adj{};
  for (int a = 0; a < n; ++a) {
    if (a == skip) continue;
    for (AgentSet r = rows[a]; r; r &= r - 1) {
      const int b = std::countr_zero(r);
      adj[a] |= singleton(b);
      adj[b] |= singleton(a);
    }
  }
  ComponentMap comp{};
  AgentSet covered = 0;
  for (int a = 0; a < n; ++a) {
    if (contains(covered, a)) continue;
    AgentSet seen = singleton(a);
    AgentSet frontier = seen;
    while (frontier) {
      AgentSet next = 0;
      for (AgentSet f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
      frontier = next & ~seen;
      seen |= next;
    }
    for (AgentSet s = seen; s; s &= s - 1) comp[std::countr_zero(s)] = seen;
    covered |= seen;
  }
  return comp;
}

double row_utility(const PayoffTables& t, const ComponentMap& comp, int i, AgentSet row) {
  AgentSet reach = comp[i];
  double cost = 0.0;
  for (AgentSet r = row; r; r &= r - 1) {
    const int j = std::countr_zero(r);
    reach |= comp[j];
    cost += t.cost(i, j);
  }
  return t.benefit(reach) - cost;
}

enum class Stability { kNotNash, kNash, kStrict };

Stability stability(const PayoffTables& t, const std::vector<std::vector<AgentSet>>& all_rows,
                    const std::vector<AgentSet>& rows, double tol) {
  bool strict = true;
  for (int i = 0; i < t.n(); ++i) {
    const ComponentMap comp = components_without(rows, i);
    const double current = row_utility(t, comp, i, rows[i]);
    for (AgentSet alt : all_rows[i]) {
      if (alt == rows[i]) continue;
      const double u = row_utility(t, comp, i, alt);
      if (u > current + tol) return Stability::kNotNash;
      if (u >= current - tol) strict = false;
    }
  }
  return strict ? Stability::kStrict : Stability::kNash;
}

std::vector<std::vector<AgentSet>> all_rows(int n) {
  std::vector<std::vector<AgentSet>> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = rows_in_bitstring_order(n, i);
  return rows;
}

void check_cap(int n, const EnumerationOptions& opts) {
  if (n > opts.max_agents) {
    throw CapExceeded(fmt::format("{} agents exceeds the enumeration cap of {}", n, opts.max_agents));
  }
}

struct ScanResult {
  std::vector<std::vector<AgentSet>> profiles;
  std::vector<bool> strict;
};

// Depth-first scan over rows, agent 0 most significant, restricted to the
// first agent's candidates in [begin, end). Visits profiles in bitstring
// order.
class ProfileScan {
 public:
  ProfileScan(const PayoffTables& t, const std::vector<std::vector<AgentSet>>& full,
              const std::vector<std::vector<AgentSet>>& candidates, bool skip_duplicates, double tol)
      : t_(t), full_(full), candidates_(candidates), skip_duplicates_(skip_duplicates), tol_(tol),
        rows_(t.n(), 0) {}

  ScanResult run(std::size_t begin, std::size_t end) {
    ScanResult out;
    for (std::size_t k = begin; k < end; ++k) {
      rows_[0] = candidates_[0][k];
      descend(1, out);
    }
    return out;
  }

 private:
  void descend(int agent, ScanResult& out) {
    if (agent == t_.n()) {
      const Stability s = stability(t_, full_, rows_, tol_);
      if (s != Stability::kNotNash) {
        out.profiles.push_back(rows_);
        out.strict.push_back(s == Stability::kStrict);
      }
      return;
    }
    for (AgentSet row : candidates_[agent]) {
      if (skip_duplicates_ && has_positive_cost_duplicate(agent, row)) continue;
      rows_[agent] = row;
      descend(agent + 1, out);
    }
  }

  // g_ij = g_ji = 1 with c_ij > tol: i keeps j's information by dropping its
  // own link, so the profile is not an equilibrium.
  bool has_positive_cost_duplicate(int agent, AgentSet row) const {
    for (int j = 0; j < agent; ++j) {
      if (contains(row, j) && contains(rows_[j], agent) &&
          (t_.cost(agent, j) > tol_ || t_.cost(j, agent) > tol_)) {
        return true;
      }
    }
    return false;
  }

  const PayoffTables& t_;
  const std::vector<std::vector<AgentSet>>& full_;
  const std::vector<std::vector<AgentSet>>& candidates_;
  bool skip_duplicates_;
  double tol_;
  std::vector<AgentSet> rows_;
};

}  // namespace

std::vector<AgentSet> best_responses(const GameConfig& cfg, const LinkProfile& p, int i,
                                     const EnumerationOptions& opts) {
  const int n = cfg.n_agents();
  check_cap(n, opts);
  if (p.n_agents() != n) throw std::invalid_argument("profile size mismatch");
  if (i < 0 || i >= n) throw std::invalid_argument("agent index out of range");
  const PayoffTables t(cfg);
  const ComponentMap comp = components_without(p.rows(), i);
  const auto rows = rows_in_bitstring_order(n, i);
  std::vector<double> u(rows.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    u[k] = row_utility(t, comp, i, rows[k]);
    best = std::max(best, u[k]);
  }
  std::vector<AgentSet> out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (u[k] >= best - opts.tolerance) out.push_back(rows[k]);
  }
  return out;
}

bool is_nash(const GameConfig& cfg, const LinkProfile& p, double tolerance) {
  if (p.n_agents() != cfg.n_agents()) throw std::invalid_argument("profile size mismatch");
  const PayoffTables t(cfg);
  return stability(t, all_rows(cfg.n_agents()), p.rows(), tolerance) != Stability::kNotNash;
}

bool is_strict_nash(const GameConfig& cfg, const LinkProfile& p, double tolerance) {
  if (p.n_agents() != cfg.n_agents()) throw std::invalid_argument("profile size mismatch");
  const PayoffTables t(cfg);
  return stability(t, all_rows(cfg.n_agents()), p.rows(), tolerance) == Stability::kStrict;
}

NashSet enumerate_nash(const GameConfig& cfg, const EnumerationOptions& opts) {
  const int n = cfg.n_agents();
  check_cap(n, opts);
  const PayoffTables t(cfg);
  const auto full = all_rows(n);
  const bool prune = opts.prune || n > kFullScanAgents;

  auto candidates = full;
  if (prune) {
    // Benefit can rise by at most f(H(all)) - f(H(X_i)) over the empty row.
    const AgentSet all = full_set(n);
    for (int i = 0; i < n; ++i) {
      const double budget = t.benefit(all) - t.benefit(singleton(i)) + opts.tolerance;
      std::erase_if(candidates[i], [&](AgentSet row) { return t.row_cost(i, row) > budget; });
    }
  }

  const std::size_t first = candidates[0].size();
  const unsigned workers = std::max(1U, std::min<unsigned>(opts.threads, static_cast<unsigned>(first)));
  std::vector<ScanResult> parts(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = first * w / workers;
      const std::size_t end = first * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        ProfileScan scan(t, full, candidates, prune, opts.tolerance);
        parts[w] = scan.run(begin, end);
      });
    }
  }

  NashSet out;
  for (auto& part : parts) {
    for (std::size_t k = 0; k < part.profiles.size(); ++k) {
      out.profiles.push_back(LinkProfile::from_rows(std::move(part.profiles[k])));
      out.strict.push_back(part.strict[k]);
    }
  }
  return out;
}

SocialOptimum social_optimum(const GameConfig& cfg, const EnumerationOptions& opts) {
  const int n = cfg.n_agents();
  check_cap(n, opts);
  const PayoffTables t(cfg);

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  const std::size_t m = edges.size();

  double best = -std::numeric_limits<double>::infinity();
  std::uint64_t best_subset = 0;
  std::array<int, kMaxAgents> parent{};
  for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << m); ++subset) {
    for (int a = 0; a < n; ++a) parent[a] = a;
    auto find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    bool forest = true;
    double cost = 0.0;
    for (std::size_t e = 0; e < m && forest; ++e) {
      if (!((subset >> e) & 1U)) continue;
      const auto [i, j] = edges[e];
      const int ri = find(i), rj = find(j);
      if (ri == rj) {
        forest = false;
      } else {
        parent[ri] = rj;
        cost += std::min(t.cost(i, j), t.cost(j, i));
      }
    }
    if (!forest) continue;
    std::array<AgentSet, kMaxAgents> comp{};
    for (int a = 0; a < n; ++a) comp[find(a)] |= singleton(a);
    double benefit = 0.0;
    for (int a = 0; a < n; ++a) {
      if (comp[a]) benefit += std::popcount(comp[a]) * t.benefit(comp[a]);
    }
    const double welfare = benefit - cost;
    if (welfare > best) {
      best = welfare;
      best_subset = subset;
    }
  }

  LinkProfile profile(n);
  for (std::size_t e = 0; e < m; ++e) {
    if (!((best_subset >> e) & 1U)) continue;
    const auto [i, j] = edges[e];
    if (t.cost(i, j) <= t.cost(j, i)) {
      profile.set_link(i, j, true);
    } else {
      profile.set_link(j, i, true);
    }
  }
  return {best, profile};
}

SocialOptimum social_optimum_exhaustive(const GameConfig& cfg, const EnumerationOptions& opts) {
  const int n = cfg.n_agents();
  check_cap(n, opts);
  const int bits = n * (n - 1);
  double best = -std::numeric_limits<double>::infinity();
  LinkProfile best_profile(n);
  std::string s(bits, '0');
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
    for (int b = 0; b < bits; ++b) s[b] = ((code >> (bits - 1 - b)) & 1U) ? '1' : '0';
    const auto p = LinkProfile::from_bitstring(n, s);
    const double w = social_welfare(cfg, p);
    if (w > best) {
      best = w;
      best_profile = p;
    }
  }
  return {best, best_profile};
}

std::optional<double> price_of_anarchy(const GameConfig& cfg, const NashSet& ne, const SocialOptimum& opt) {
  if (ne.profiles.empty()) return std::nullopt;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : ne.profiles) worst = std::min(worst, social_welfare(cfg, p));
  if (!(worst > 0.0)) return std::nullopt;
  return opt.value / worst;
}

std::optional<double> price_of_anarchy(const GameConfig& cfg, const EnumerationOptions& opts) {
  return price_of_anarchy(cfg, enumerate_nash(cfg, opts), social_optimum(cfg, opts));
}

double max_information_loss(const GameConfig& cfg, const NashSet& ne) {
  double mil = 0.0;
  for (int i = 0; i < cfg.n_agents(); ++i) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : ne.profiles) {
      const double h = gathered_information(cfg, p, i);
      lo = std::min(lo, h);
      hi = std::max(hi, h);
    }
    if (!ne.profiles.empty()) mil = std::max(mil, hi - lo);
  }
  return mil;
}

double max_information_loss(const GameConfig& cfg, const EnumerationOptions& opts) {
  return max_information_loss(cfg, enumerate_nash(cfg, opts));
}

EquilibriumReport analyze_equilibria(const GameConfig& cfg, const EnumerationOptions& opts) {
  const NashSet ne = enumerate_nash(cfg, opts);
  const SocialOptimum opt = social_optimum(cfg, opts);
  EquilibriumReport r;
  r.ne_profiles = ne.profiles;
  r.ne_strict = ne.strict;
  r.worst_ne_welfare = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ne.profiles.size(); ++k) {
    const double w = social_welfare(cfg, ne.profiles[k]);
    r.ne_welfare.push_back(w);
    r.worst_ne_welfare = std::min(r.worst_ne_welfare, w);
    if (ne.strict[k]) r.strict_ne_profiles.push_back(ne.profiles[k]);
  }
  r.social_optimum_value = opt.value;
  r.social_optimum_profile = opt.profile;
  r.poa = price_of_anarchy(cfg, ne, opt);
  r.mil = max_information_loss(cfg, ne);
  return r;
}

void write_report_text(std::ostream& out, const GameConfig& cfg, const EquilibriumReport& r) {
  out << fmt::format("agents: {}\n", cfg.n_agents());
  out << fmt::format("benefit: {}\n", cfg.f.name());
  out << fmt::format("equilibria: {} ({} strict)\n", r.ne_profiles.size(), r.strict_ne_profiles.size());
  for (std::size_t k = 0; k < r.ne_profiles.size(); ++k) {
    out << fmt::format("  {} welfare={:.12g}{}\n", r.ne_profiles[k].bitstring(), r.ne_welfare[k],
                       r.ne_strict[k] ? " strict" : "");
  }
  out << fmt::format("social optimum: {:.12g}", r.social_optimum_value);
  if (r.social_optimum_profile) out << " at " << r.social_optimum_profile->bitstring();
  out << '\n';
  out << fmt::format("worst equilibrium welfare: {:.12g}\n", r.worst_ne_welfare);
  out << (r.poa ? fmt::format("price of anarchy: {:.12g}\n", *r.poa) : std::string("price of anarchy: undefined\n"));
  out << fmt::format("maximum information loss: {:.12g} bits\n", r.mil);
}

void write_report_csv(std::ostream& out, const GameConfig& cfg, const EquilibriumReport& r) {
  out << "profile,welfare";
  for (int i = 0; i < cfg.n_agents(); ++i) out << ",info_" << (i + 1);
  out << ",strict\n";
  for (std::size_t k = 0; k < r.ne_profiles.size(); ++k) {
    out << r.ne_profiles[k].bitstring() << fmt::format(",{:.12g}", r.ne_welfare[k]);
    for (int i = 0; i < cfg.n_agents(); ++i) {
      out << fmt::format(",{:.12g}", gathered_information(cfg, r.ne_profiles[k], i));
    }
    out << (r.ne_strict[k] ? ",1\n" : ",0\n");
  }
}

}  // namespace cin
