// The link-formation game: link profiles, the induced undirected topology,
// costs, benefit functions, and the resulting utilities.
#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cin/entropy.hpp"

namespace cin {

/// Directed link decisions g. Row i holds the agents that i links to.
class LinkProfile {
 public:
  explicit LinkProfile(int n_agents);
  static LinkProfile from_rows(std::vector<AgentSet> rows);
  /// Off-diagonal entries in row-major order: g12 g13 ... g21 g23 ...
  static LinkProfile from_bitstring(int n_agents, std::string_view bits);

  int n_agents() const { return static_cast<int>(rows_.size()); }
  bool link(int i, int j) const { return contains(rows_[i], j); }
  void set_link(int i, int j, bool on);
  AgentSet row(int i) const { return rows_[i]; }
  void set_row(int i, AgentSet row);
  const std::vector<AgentSet>& rows() const { return rows_; }

  int link_count() const;
  std::string bitstring() const;

  friend bool operator==(const LinkProfile&, const LinkProfile&) = default;

 private:
  std::vector<AgentSet> rows_;
};

/// Every row agent i can choose, ordered as in LinkProfile::bitstring().
std::vector<AgentSet> rows_in_bitstring_order(int n_agents, int i);

/// N lines of N '0'/'1' characters.
std::string to_text(const LinkProfile& p);
LinkProfile profile_from_text(std::string_view text);

/// Undirected edges {i, j}, i < j, present when g_ij or g_ji.
std::vector<std::pair<int, int>> topology(const LinkProfile& p);
/// Symmetrized neighbour masks.
std::vector<AgentSet> adjacency(const LinkProfile& p);
/// Connected components, ordered by their smallest member.
std::vector<AgentSet> components(const LinkProfile& p);
/// Component of i without i itself.
AgentSet reachable_set(const LinkProfile& p, int i);
/// True iff the component is a tree. Throws if `comp` is not a component.
bool is_minimally_connected(const LinkProfile& p, AgentSet comp);

class CostModel {
 public:
  enum class Kind { kHomogeneous, kRecipientDependent, kGeneral };

  static CostModel homogeneous(double c);
  static CostModel recipient_dependent(std::vector<double> c);
  static CostModel general(std::vector<std::vector<double>> c);

  Kind kind() const;
  /// Cost paid by i for a link to j.
  double operator()(int i, int j) const;
  /// Number of agents the model is sized for; 0 for homogeneous.
  int size() const;

  double homogeneous_cost() const;
  /// Per-recipient costs; homogeneous models are expanded to n entries.
  std::vector<double> recipient_costs(int n) const;

 private:
  struct Homogeneous { double c; };
  struct RecipientDependent { std::vector<double> c; };
  struct General { std::vector<std::vector<double>> c; };
  using Variant = std::variant<Homogeneous, RecipientDependent, General>;

  explicit CostModel(Variant v) : model_(std::move(v)) {}
  Variant model_;
};

/// Increasing concave f with f(0) = 0.
class BenefitFunction {
 public:
  /// log_base(1 + x); base 2 matches bit-valued entropies.
  static BenefitFunction log_one_plus(double base = 2.0);
  static BenefitFunction natural_log_one_plus();
  /// x^alpha, alpha in (0, 1).
  static BenefitFunction power(double alpha);
  static BenefitFunction linear(double slope = 1.0);

  double operator()(double x) const { return value_(x); }
  double derivative(double x) const { return derivative_(x); }
  const std::string& name() const { return name_; }

 private:
  BenefitFunction(std::string name, std::function<double(double)> value,
                  std::function<double(double)> derivative);

  std::string name_;
  std::function<double(double)> value_;
  std::function<double(double)> derivative_;
};

struct GameConfig {
  GameConfig(EntropicVector ev, BenefitFunction f, CostModel costs);

  int n_agents() const { return ev.n_agents(); }
  double cost(int i, int j) const { return costs(i, j); }

  EntropicVector ev;
  BenefitFunction f;
  CostModel costs;
};

/// H(X_{i u R_i}): the information agent i gathers under p.
double gathered_information(const GameConfig& cfg, const LinkProfile& p, int i);
/// u_i(g) = f(H(X_{i u R_i})) - sum_{j : g_ij} c_ij
double utility(const GameConfig& cfg, const LinkProfile& p, int i);
double social_welfare(const GameConfig& cfg, const LinkProfile& p);

}  // namespace cin
