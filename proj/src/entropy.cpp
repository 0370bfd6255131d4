#include "cin/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace cin {

int popcount(AgentSet s) { return std::popcount(s); }

namespace {

void check_agent_count(int n) {
  if (n < 1 || n > kMaxAgents) {
    throw std::invalid_argument(
        fmt::format("agent count {} outside [1, {}]", n, kMaxAgents));
  }
}

std::string set_name(AgentSet s) {
  std::string out = "{";
  bool first = true;
  for (int i = 0; s >> i; ++i) {
    if (!contains(s, i)) continue;
    if (!first) out += ',';
    out += std::to_string(i + 1);
    first = false;
  }
  return out + "}";
}

double clamp_small_negative(double v) {
  return (v < 0.0 && v >= -kTolerance) ? 0.0 : v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (trim(s.substr(pos)).size() != 0) throw std::invalid_argument("trailing characters in '" + s + "'");
  return v;
}

}  // namespace

SubsetId::SubsetId(AgentSet mask, int n_agents) : mask_(mask) {
  check_agent_count(n_agents);
  if (mask == 0 || mask > full_set(n_agents)) {
    throw std::invalid_argument(
        fmt::format("subset mask {} invalid for {} agents", mask, n_agents));
  }
}

SubsetId SubsetId::of(std::initializer_list<int> agents, int n_agents) {
  AgentSet mask = 0;
  for (int a : agents) {
    if (a < 0 || a >= n_agents) {
      throw std::invalid_argument(fmt::format("agent index {} out of range", a));
    }
    mask |= singleton(a);
  }
  return SubsetId(mask, n_agents);
}

EntropicVector::EntropicVector(int n_agents, std::vector<double> entries)
    : n_agents_(n_agents), entries_(std::move(entries)) {
  check_agent_count(n_agents);
  if (entries_.size() != full_set(n_agents)) {
    throw std::invalid_argument(fmt::format(
        "entropic vector of order {} needs {} entries, got {}", n_agents,
        full_set(n_agents), entries_.size()));
  }
  for (double v : entries_) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite entropy entry");
  }
}

JointPmf::JointPmf(std::vector<int> alphabet_sizes, std::vector<double> probabilities)
    : alphabet_sizes_(std::move(alphabet_sizes)), probabilities_(std::move(probabilities)) {
  check_agent_count(n_agents());
  std::size_t outcomes = 1;
  for (int a : alphabet_sizes_) {
    if (a < 1) throw std::invalid_argument("alphabet size must be positive");
    outcomes *= static_cast<std::size_t>(a);
  }
  if (outcomes != probabilities_.size()) {
    throw std::invalid_argument(fmt::format(
        "probability table has {} entries, alphabet product is {}",
        probabilities_.size(), outcomes));
  }
  double sum = 0.0;
  for (double p : probabilities_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("probabilities must be nonnegative and finite");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument(fmt::format("probabilities sum to {:.17g}, not 1", sum));
  }
}

EntropicVector from_joint_pmf(const JointPmf& pmf) {
  const int n = pmf.n_agents();
  const auto& sizes = pmf.alphabet_sizes();
  const auto& probs = pmf.probabilities();

  // Digits of every outcome, last agent fastest.
  std::vector<std::vector<int>> digits(probs.size(), std::vector<int>(n));
  for (std::size_t o = 0; o < probs.size(); ++o) {
    std::size_t rem = o;
    for (int i = n - 1; i >= 0; --i) {
      digits[o][i] = static_cast<int>(rem % sizes[i]);
      rem /= sizes[i];
    }
  }

  std::vector<double> entries(full_set(n));
  std::vector<double> marginal;
  for (AgentSet mask = 1; mask <= full_set(n); ++mask) {
    std::size_t cells = 1;
    for (int i = 0; i < n; ++i) {
      if (contains(mask, i)) cells *= sizes[i];
    }
    marginal.assign(cells, 0.0);
    for (std::size_t o = 0; o < probs.size(); ++o) {
      if (probs[o] == 0.0) continue;
      std::size_t idx = 0;
      for (int i = 0; i < n; ++i) {
        if (contains(mask, i)) idx = idx * sizes[i] + digits[o][i];
      }
      marginal[idx] += probs[o];
    }
    double h = 0.0;
    for (double p : marginal) {
      if (p > 0.0) h -= p * std::log2(p);
    }
    entries[mask - 1] = std::max(h, 0.0);
  }
  return EntropicVector(n, std::move(entries));
}

std::string ShannonViolation::describe() const {
  switch (kind) {
    case Kind::kNonnegativity:
      return fmt::format("nonnegativity: H{} >= 0 fails by {:.3g}", set_name(a), -slack);
    case Kind::kMonotonicity:
      return fmt::format("monotonicity: H{} <= H{} fails by {:.3g}", set_name(a),
                         set_name(b), -slack);
    case Kind::kSubmodularity:
      return fmt::format("submodularity: H{} + H{} >= H{} + H{} fails by {:.3g}",
                         set_name(a), set_name(b), set_name(a | b), set_name(a & b),
                         -slack);
  }
  return {};
}

ShannonReport validate_shannon(const EntropicVector& ev, double tolerance) {
  ShannonReport report;
  const int n = ev.n_agents();
  const AgentSet all = ev.all();

  for (AgentSet s = 1; s <= all; ++s) {
    if (ev(s) < -tolerance) {
      report.violations.push_back({ShannonViolation::Kind::kNonnegativity, s, 0, ev(s)});
    }
  }
  // H(all) >= H(all - i)
  for (int i = 0; i < n; ++i) {
    const AgentSet rest = all & ~singleton(i);
    if (rest == 0) continue;
    const double slack = ev(all) - ev(rest);
    if (slack < -tolerance) {
      report.violations.push_back({ShannonViolation::Kind::kMonotonicity, rest, all, slack});
    }
  }
  // I(i; j | K) >= 0 for every K disjoint from {i, j}
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const AgentSet others = all & ~singleton(i) & ~singleton(j);
      for (AgentSet k = others;; k = (k - 1) & others) {
        const AgentSet a = k | singleton(i);
        const AgentSet b = k | singleton(j);
        const double slack = ev(a) + ev(b) - ev(a | b) - ev(k);
        if (slack < -tolerance) {
          report.violations.push_back({ShannonViolation::Kind::kSubmodularity, a, b, slack});
        }
        if (k == 0) break;
      }
    }
  }
  return report;
}

double subset_entropy(const EntropicVector& ev, SubsetId s) {
  if (s.mask() > ev.all()) throw std::invalid_argument("subset exceeds agent count");
  return ev(s);
}

namespace {
void check_disjoint(const EntropicVector& ev, SubsetId a, SubsetId b) {
  if (a.mask() > ev.all() || b.mask() > ev.all()) {
    throw std::invalid_argument("subset exceeds agent count");
  }
  if (a.mask() & b.mask()) throw std::invalid_argument("subsets overlap");
}
}  // namespace

double cond_entropy(const EntropicVector& ev, SubsetId a, SubsetId b) {
  check_disjoint(ev, a, b);
  return clamp_small_negative(ev(a.mask() | b.mask()) - ev(b));
}

double mutual_info(const EntropicVector& ev, SubsetId a, SubsetId b) {
  check_disjoint(ev, a, b);
  return clamp_small_negative(ev(a) + ev(b) - ev(a.mask() | b.mask()));
}

double kl_total(const EntropicVector& ev) {
  double sum = 0.0;
  for (int i = 0; i < ev.n_agents(); ++i) sum += ev(singleton(i));
  return sum - ev.joint();
}

namespace {
void check_family_input(std::span<const double> h) {
  check_agent_count(static_cast<int>(h.size()));
  for (double v : h) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("per-agent entropies must be nonnegative");
    }
  }
}
}  // namespace

EntropicVector family_independent(std::span<const double> h) {
  check_family_input(h);
  const int n = static_cast<int>(h.size());
  std::vector<double> entries(full_set(n));
  for (AgentSet s = 1; s <= full_set(n); ++s) {
    const int low = std::countr_zero(s);
    const AgentSet rest = s & (s - 1);
    entries[s - 1] = h[low] + (rest ? entries[rest - 1] : 0.0);
  }
  return EntropicVector(n, std::move(entries));
}

EntropicVector family_max_correlated(std::span<const double> h) {
  check_family_input(h);
  const int n = static_cast<int>(h.size());
  std::vector<double> entries(full_set(n));
  for (AgentSet s = 1; s <= full_set(n); ++s) {
    const int low = std::countr_zero(s);
    const AgentSet rest = s & (s - 1);
    entries[s - 1] = std::max(h[low], rest ? entries[rest - 1] : 0.0);
  }
  return EntropicVector(n, std::move(entries));
}

EntropicVector family_example1(double h1, double h2, double h3, double kl) {
  const double h[] = {h1, h2, h3};
  check_family_input(h);
  if (!(kl >= 0.0) || kl > std::min(h2, h3)) {
    throw std::invalid_argument(
        fmt::format("redundancy {} outside [0, min(h2, h3)] = [0, {}]", kl, std::min(h2, h3)));
  }
  // Masks: 1={1} 2={2} 3={1,2} 4={3} 5={1,3} 6={2,3} 7={1,2,3}
  return EntropicVector(3, {h1, h2, h1 + h2, h3, h1 + h3, h2 + h3 - kl, h1 + h2 + h3 - kl});
}

void write_entropic_vector(std::ostream& out, const EntropicVector& ev) {
  out << fmt::format("n_agents,{}\n", ev.n_agents());
  for (AgentSet s = 1; s <= ev.all(); ++s) {
    out << fmt::format("{},{:.16e}\n", s, ev(s));
  }
}

EntropicVector read_entropic_vector(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<double> entries;
  std::vector<bool> seen;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto parts = split(line, ',');
    if (parts.size() != 2) {
      throw std::invalid_argument(fmt::format("line {}: expected two fields", line_no));
    }
    if (n < 0) {
      if (trim(parts[0]) != "n_agents") {
        throw std::invalid_argument("entropic vector document must start with n_agents");
      }
      n = std::stoi(parts[1]);
      check_agent_count(n);
      entries.assign(full_set(n), 0.0);
      seen.assign(full_set(n), false);
      continue;
    }
    const long mask = std::stol(parts[0]);
    if (mask < 1 || static_cast<AgentSet>(mask) > full_set(n)) {
      throw std::invalid_argument(fmt::format("line {}: mask {} out of range", line_no, mask));
    }
    entries[mask - 1] = parse_double(trim(parts[1]));
    seen[mask - 1] = true;
  }
  if (n < 0) throw std::invalid_argument("empty entropic vector document");
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("entropic vector document is missing subsets");
  }
  return EntropicVector(n, std::move(entries));
}

JointPmf read_pmf_csv(std::istream& in) {
  std::vector<std::vector<int>> rows;
  std::vector<double> probs;
  std::string line;
  int line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto parts = split(line, ',');
    if (rows.empty() && probs.empty() && !parts.empty() &&
        !std::isdigit(static_cast<unsigned char>(trim(parts[0]).front()))) {
      continue;  // header
    }
    if (parts.size() < 2) throw std::invalid_argument(fmt::format("line {}: too few columns", line_no));
    if (width == 0) width = parts.size();
    if (parts.size() != width) throw std::invalid_argument(fmt::format("line {}: ragged row", line_no));
    std::vector<int> symbols;
    for (std::size_t c = 0; c + 1 < parts.size(); ++c) {
      const int v = std::stoi(parts[c]);
      if (v < 0) throw std::invalid_argument(fmt::format("line {}: negative symbol", line_no));
      symbols.push_back(v);
    }
    rows.push_back(std::move(symbols));
    probs.push_back(parse_double(trim(parts.back())));
  }
  if (rows.empty()) throw std::invalid_argument("pmf CSV has no rows");
  const int n = static_cast<int>(width - 1);
  check_agent_count(n);
  std::vector<int> sizes(n, 1);
  for (const auto& r : rows) {
    for (int i = 0; i < n; ++i) sizes[i] = std::max(sizes[i], r[i] + 1);
  }
  std::size_t outcomes = 1;
  for (int s : sizes) outcomes *= s;
  std::vector<double> table(outcomes, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) idx = idx * sizes[i] + rows[r][i];
    table[idx] += probs[r];
  }
  return JointPmf(std::move(sizes), std::move(table));
}

}  // namespace cin
