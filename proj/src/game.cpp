#include "cin/game.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace cin {

LinkProfile::LinkProfile(int n_agents) {
  if (n_agents < 1 || n_agents > kMaxAgents) {
    throw std::invalid_argument(fmt::format("agent count {} outside [1, {}]", n_agents, kMaxAgents));
  }
  rows_.assign(n_agents, 0);
}

LinkProfile LinkProfile::from_rows(std::vector<AgentSet> rows) {
  LinkProfile p(static_cast<int>(rows.size()));
  for (int i = 0; i < p.n_agents(); ++i) p.set_row(i, rows[i]);
  return p;
}

LinkProfile LinkProfile::from_bitstring(int n_agents, std::string_view bits) {
  LinkProfile p(n_agents);
  if (bits.size() != static_cast<std::size_t>(n_agents * (n_agents - 1))) {
    throw std::invalid_argument(fmt::format("bitstring '{}' has wrong length for {} agents", bits, n_agents));
  }
  std::size_t k = 0;
  for (int i = 0; i < n_agents; ++i) {
    for (int j = 0; j < n_agents; ++j) {
      if (i == j) continue;
      const char ch = bits[k++];
      if (ch != '0' && ch != '1') throw std::invalid_argument("bitstring must be 0/1");
      p.set_link(i, j, ch == '1');
    }
  }
  return p;
}

void LinkProfile::set_link(int i, int j, bool on) {
  if (i == j) throw std::invalid_argument("self-links are not allowed");
  if (i < 0 || j < 0 || i >= n_agents() || j >= n_agents()) {
    throw std::invalid_argument("agent index out of range");
  }
  if (on) {
    rows_[i] |= singleton(j);
  } else {
    rows_[i] &= ~singleton(j);
  }
}

void LinkProfile::set_row(int i, AgentSet row) {
  if (contains(row, i)) throw std::invalid_argument("self-links are not allowed");
  if (row & ~full_set(n_agents())) throw std::invalid_argument("row references unknown agents");
  rows_[i] = row;
}

int LinkProfile::link_count() const {
  int n = 0;
  for (AgentSet r : rows_) n += std::popcount(r);
  return n;
}

std::string LinkProfile::bitstring() const {
  std::string out;
  for (int i = 0; i < n_agents(); ++i) {
    for (int j = 0; j < n_agents(); ++j) {
      if (i != j) out += link(i, j) ? '1' : '0';
    }
  }
  return out;
}

std::vector<AgentSet> rows_in_bitstring_order(int n_agents, int i) {
  const int m = n_agents - 1;
  std::vector<AgentSet> rows(std::size_t{1} << m);
  for (AgentSet rank = 0; rank < rows.size(); ++rank) {
    // The highest rank bit is the first character, i.e. the lowest agent.
    AgentSet compact = 0;
    for (int b = 0; b < m; ++b) {
      if ((rank >> b) & 1U) compact |= AgentSet{1} << (m - 1 - b);
    }
    const AgentSet low = compact & (singleton(i) - 1);
    const AgentSet high = (compact >> i) << (i + 1);
    rows[rank] = low | high;
  }
  return rows;
}

std::string to_text(const LinkProfile& p) {
  std::string out;
  for (int i = 0; i < p.n_agents(); ++i) {
    for (int j = 0; j < p.n_agents(); ++j) out += p.link(i, j) ? '1' : '0';
    out += '\n';
  }
  return out;
}

LinkProfile profile_from_text(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  const int n = static_cast<int>(lines.size());
  LinkProfile p(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(lines[i].size()) != n) {
      throw std::invalid_argument(fmt::format("profile row {} has {} columns, expected {}", i + 1, lines[i].size(), n));
    }
    for (int j = 0; j < n; ++j) {
      const char ch = lines[i][j];
      if (ch != '0' && ch != '1') throw std::invalid_argument("profile text must be 0/1");
      if (i == j) {
        if (ch == '1') throw std::invalid_argument("diagonal entries must be 0");
        continue;
      }
      p.set_link(i, j, ch == '1');
    }
  }
  return p;
}

std::vector<std::pair<int, int>> topology(const LinkProfile& p) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < p.n_agents(); ++i) {
    for (int j = i + 1; j < p.n_agents(); ++j) {
      if (p.link(i, j) || p.link(j, i)) edges.emplace_back(i, j);
    }
  }
  return edges;
}

std::vector<AgentSet> adjacency(const LinkProfile& p) {
  std::vector<AgentSet> adj(p.n_agents(), 0);
  for (int i = 0; i < p.n_agents(); ++i) {
    for (int j = 0; j < p.n_agents(); ++j) {
      if (p.link(i, j)) {
        adj[i] |= singleton(j);
        adj[j] |= singleton(i);
      }
    }
  }
  return adj;
}

namespace {
AgentSet component_of(const std::vector<AgentSet>& adj, int start) {
  AgentSet seen = singleton(start);
  AgentSet frontier = seen;
  while (frontier) {
    AgentSet next = 0;
    for (AgentSet f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
    frontier = next & ~seen;
    seen |= next;
  }
  return seen;
}
}  // namespace

std::vector<AgentSet> components(const LinkProfile& p) {
  const auto adj = adjacency(p);
  std::vector<AgentSet> out;
  AgentSet covered = 0;
  for (int i = 0; i < p.n_agents(); ++i) {
    if (contains(covered, i)) continue;
    const AgentSet c = component_of(adj, i);
    covered |= c;
    out.push_back(c);
  }
  return out;
}

AgentSet reachable_set(const LinkProfile& p, int i) {
  return component_of(adjacency(p), i) & ~singleton(i);
}

bool is_minimally_connected(const LinkProfile& p, AgentSet comp) {
  const auto comps = components(p);
  if (std::find(comps.begin(), comps.end(), comp) == comps.end()) {
    throw std::invalid_argument("subset is not a component of the profile");
  }
  int edges = 0;
  for (auto [i, j] : topology(p)) {
    if (contains(comp, i)) ++edges;
  }
  return edges == std::popcount(comp) - 1;
}

// --- costs ---------------------------------------------------------------

namespace {
void check_cost(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("link costs must be nonnegative and finite");
}
}  // namespace

CostModel CostModel::homogeneous(double c) {
  check_cost(c);
  return CostModel(Homogeneous{c});
}

CostModel CostModel::recipient_dependent(std::vector<double> c) {
  if (c.empty()) throw std::invalid_argument("recipient costs must be nonempty");
  for (double v : c) check_cost(v);
  return CostModel(RecipientDependent{std::move(c)});
}

CostModel CostModel::general(std::vector<std::vector<double>> c) {
  for (const auto& row : c) {
    if (row.size() != c.size()) throw std::invalid_argument("cost matrix must be square");
    for (double v : row) check_cost(v);
  }
  return CostModel(General{std::move(c)});
}

CostModel::Kind CostModel::kind() const {
  return static_cast<Kind>(model_.index());
}

double CostModel::operator()(int i, int j) const {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Homogeneous>) {
          return m.c;
        } else if constexpr (std::is_same_v<T, RecipientDependent>) {
          return m.c[j];
        } else {
          return m.c[i][j];
        }
      },
      model_);
}

int CostModel::size() const {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Homogeneous>) {
          return 0;
        } else {
          return static_cast<int>(m.c.size());
        }
      },
      model_);
}

double CostModel::homogeneous_cost() const {
  if (const auto* h = std::get_if<Homogeneous>(&model_)) return h->c;
  throw std::invalid_argument("cost model is not homogeneous");
}

std::vector<double> CostModel::recipient_costs(int n) const {
  if (const auto* h = std::get_if<Homogeneous>(&model_)) return std::vector<double>(n, h->c);
  if (const auto* r = std::get_if<RecipientDependent>(&model_)) return r->c;
  throw std::invalid_argument("general cost matrices are not recipient-dependent");
}

// --- benefit functions ---------------------------------------------------

BenefitFunction::BenefitFunction(std::string name, std::function<double(double)> value,
                                 std::function<double(double)> derivative)
    : name_(std::move(name)), value_(std::move(value)), derivative_(std::move(derivative)) {
  if (std::abs(value_(0.0)) > kTolerance) throw std::invalid_argument(name_ + ": f(0) must be 0");
  // Increasing and concave, checked on a grid over [0, 64].
  constexpr int kSteps = 256;
  constexpr double kStep = 0.25;
  double prev = value_(0.0);
  double prev_diff = std::numeric_limits<double>::infinity();
  for (int s = 1; s <= kSteps; ++s) {
    const double cur = value_(s * kStep);
    const double diff = cur - prev;
    if (!(diff > 0.0)) throw std::invalid_argument(name_ + ": benefit must be strictly increasing");
    if (diff > prev_diff + 1e-12) throw std::invalid_argument(name_ + ": benefit must be concave");
    prev = cur;
    prev_diff = diff;
  }
}

BenefitFunction BenefitFunction::log_one_plus(double base) {
  if (!(base > 1.0)) throw std::invalid_argument("logarithm base must exceed 1");
  const double scale = 1.0 / std::log(base);
  const std::string name =
      base == 2.0 ? "log2(1+x)" : (base == std::numbers::e ? "ln(1+x)" : fmt::format("log_{}(1+x)", base));
  return BenefitFunction(
      name, [scale](double x) { return std::log1p(x) * scale; },
      [scale](double x) { return scale / (1.0 + x); });
}

BenefitFunction BenefitFunction::natural_log_one_plus() { return log_one_plus(std::numbers::e); }

BenefitFunction BenefitFunction::power(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("power exponent must lie in (0, 1)");
  return BenefitFunction(
      fmt::format("x^{}", alpha), [alpha](double x) { return std::pow(x, alpha); },
      [alpha](double x) {
        return x == 0.0 ? std::numeric_limits<double>::infinity() : alpha * std::pow(x, alpha - 1.0);
      });
}

BenefitFunction BenefitFunction::linear(double slope) {
  if (!(slope > 0.0)) throw std::invalid_argument("linear slope must be positive");
  return BenefitFunction(
      fmt::format("{}x", slope), [slope](double x) { return slope * x; },
      [slope](double) { return slope; });
}

// --- game ----------------------------------------------------------------

GameConfig::GameConfig(EntropicVector ev_in, BenefitFunction f_in, CostModel costs_in)
    : ev(std::move(ev_in)), f(std::move(f_in)), costs(std::move(costs_in)) {
  if (costs.kind() != CostModel::Kind::kHomogeneous && costs.size() != ev.n_agents()) {
    throw std::invalid_argument(
        fmt::format("cost model sized for {} agents, entropic vector has {}", costs.size(), ev.n_agents()));
  }
}

double gathered_information(const GameConfig& cfg, const LinkProfile& p, int i) {
  if (p.n_agents() != cfg.n_agents()) throw std::invalid_argument("profile size mismatch");
  return cfg.ev(component_of(adjacency(p), i));
}

double utility(const GameConfig& cfg, const LinkProfile& p, int i) {
  double cost = 0.0;
  for (AgentSet r = p.row(i); r; r &= r - 1) cost += cfg.cost(i, std::countr_zero(r));
  return cfg.f(gathered_information(cfg, p, i)) - cost;
}

double social_welfare(const GameConfig& cfg, const LinkProfile& p) {
  double total = 0.0;
  for (int i = 0; i < p.n_agents(); ++i) total += utility(cfg, p, i);
  return total;
}

}  // namespace cin
