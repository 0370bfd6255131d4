// Closed-form predictions for the formation game: connectivity regions,
// structural equilibrium conditions, and PoA / MIL values or bounds.
#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "cin/game.hpp"

namespace cin {

enum class Region { kConnected, kIsolated, kMixed };

/// "K_C", "K_I" or "K_M".
std::string_view region_label(Region r);

struct Thresholds {
  double c_l;  // f(H(all)) - f(min_i H(X_-i))
  double c_u;  // f(H(all)) - f(min_i H(X_i))
};

Thresholds thresholds_homogeneous(const EntropicVector& ev, const BenefitFunction& f);
/// c <= c_l is K_C, c >= c_u is K_I, anything between is K_M.
Region region_homogeneous(const Thresholds& t, double c);

/// How the connected region is tested for recipient-dependent costs.
enum class KcRule {
  kAllAgents,    // c_i < f(H(all)) - f(H(X_-i)) for every i
  kArgminAgent,  // the same inequality for i = argmin_j H(X_-j) only
};

/// Throws unless costs are recipient-dependent.
Region region_heterogeneous(const EntropicVector& ev, const BenefitFunction& f, const CostModel& costs,
                            KcRule rule = KcRule::kAllAgents);
/// Dispatches on the cost model; throws for a general cost matrix.
Region classify(const GameConfig& cfg, KcRule rule = KcRule::kAllAgents);

/// Disjoint blocks covering every agent, ordered by smallest member.
using Partition = std::vector<AgentSet>;

/// Every partition of n agents, in a fixed order.
std::vector<Partition> all_partitions(int n);
/// Sorts blocks by smallest member.
Partition canonical(Partition p);

/// Whether a network with exactly these components can be an equilibrium,
/// by the closed-form conditions for homogeneous or recipient-dependent
/// costs. Throws on an invalid partition or a general cost matrix.
bool check_component_structure_ne(const GameConfig& cfg, const Partition& part,
                                  double tolerance = kTolerance);

/// Strict-equilibrium shape test for homogeneous costs: component
/// conditions, core-sponsored stars, and high-marginal-value peripheries.
bool check_strict_ne_structure(const GameConfig& cfg, const LinkProfile& p,
                               double tolerance = kTolerance);

struct Prediction {
  double value;
  bool is_bound;  // upper bound rather than exact value
  Region region;
};

/// Connected-region PoA for recipient-dependent costs:
/// (N f(H) - (N-1) min c) / (N f(H) - sum c + min c).
double poa_recipient_connected(const EntropicVector& ev, const BenefitFunction& f,
                               std::span<const double> costs);

Prediction poa_predict(const GameConfig& cfg, KcRule rule = KcRule::kAllAgents);
Prediction mil_predict(const GameConfig& cfg, KcRule rule = KcRule::kAllAgents);

/// Connected-region PoA over a redundancy grid of the three-agent example
/// family. Throws std::domain_error if a grid point leaves K_C.
std::vector<double> poa_monotonicity_sweep(double h1, double h2, double h3, const BenefitFunction& f,
                                           std::span<const double> costs,
                                           std::span<const double> kl_grid,
                                           KcRule rule = KcRule::kAllAgents);

struct RegionRow {
  double c;
  double kl;
  Region region;
  Thresholds thresholds;
  Prediction poa;
  Prediction mil;
};

/// Homogeneous sweep over the three-agent example family, kl-major then c.
std::vector<RegionRow> region_sweep(double h1, double h2, double h3, const BenefitFunction& f,
                                    std::span<const double> c_grid, std::span<const double> kl_grid);

/// c,kl,region,c_l,c_u,poa_or_bound,mil_or_bound
void write_region_csv(std::ostream& out, std::span<const RegionRow> rows);

}  // namespace cin
