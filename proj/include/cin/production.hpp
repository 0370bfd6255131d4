// Joint information production and link formation. Each agent chooses how
// many bits to produce at unit cost k and which links to sponsor at cost c;
// the information in a set of agents aggregates by sum (independent
// sources) or by max (fully correlated sources).
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cin/equilibrium.hpp"
#include "cin/game.hpp"

namespace cin {

enum class Aggregation { kSum, kMax };

std::string_view aggregation_name(Aggregation a);  // "sum" / "max"
Aggregation aggregation_from_name(std::string_view name);

/// Largest agent count accepted by the deviation check.
inline constexpr int kProductionCheckAgents = 12;
/// Largest agent count scanned over the full link x production grid.
inline constexpr int kProductionFullScanAgents = 3;

/// Root of f'(H) = k by bisection; 0 when k >= f'(0). Throws for k <= 0 or
/// when f' never falls to k.
double h_bar(const BenefitFunction& f, double k);

struct ProductionGameConfig {
  /// delta defaults to h_bar / 6.
  static ProductionGameConfig make(int n_agents, BenefitFunction f, double k, double c, Aggregation agg,
                                   double delta = 0.0);

  /// The weak inequality c >= k h_bar counts as high cost.
  bool low_cost() const { return c < k * h_bar; }
  /// {0, delta, ..., ceil(h_bar/delta) delta} u {h_bar}, ascending.
  std::vector<double> grid() const;

  int n_agents;
  BenefitFunction f;
  double k;
  double c;
  Aggregation agg;
  double delta;
  double h_bar;
};

struct ProductionProfile {
  std::vector<double> production;
  LinkProfile links;

  friend bool operator==(const ProductionProfile&, const ProductionProfile&) = default;
};

/// "<link bitstring>,<p_1>,...,<p_N>"
std::string to_text(const ProductionProfile& s);
ProductionProfile production_profile_from_text(int n_agents, std::string_view text);

/// Aggregate information held by `members`.
double aggregate(Aggregation agg, std::span<const double> production, AgentSet members);

double production_utility(const ProductionGameConfig& cfg, const ProductionProfile& s, int i);

/// No agent gains more than the tolerance by changing its row and its
/// production level over the grid, h_bar, and the exact best response.
bool is_production_ne(const ProductionGameConfig& cfg, const ProductionProfile& s,
                      double tolerance = kTolerance);

/// Independent sources. Low cost: minimally connected, total production
/// h_bar, and every link brings at least c/k bits that its sponsor would
/// otherwise lose. High cost: no links, everyone produces h_bar.
bool check_sum_structure(const ProductionGameConfig& cfg, const ProductionProfile& s,
                         double tolerance = kTolerance);
/// Correlated sources. Low cost: minimally connected, a single producer at
/// h_bar, and every other agent sponsors exactly one link. High cost as
/// above.
bool check_max_structure(const ProductionGameConfig& cfg, const ProductionProfile& s,
                         double tolerance = kTolerance);
/// Picks the check matching cfg.agg.
bool check_production_structure(const ProductionGameConfig& cfg, const ProductionProfile& s,
                                double tolerance = kTolerance);

struct ProductionEnumOptions {
  int max_agents = kFullScanAgents;
  unsigned threads = 1;
  double tolerance = kTolerance;
};

/// Equilibria sorted by link bitstring, then production vector. Full grid
/// scan up to kProductionFullScanAgents; above that, candidates shaped like
/// the structural characterizations are generated and verified.
std::vector<ProductionProfile> enumerate_production_ne(const ProductionGameConfig& cfg,
                                                       const ProductionEnumOptions& opts = {});

struct FewMetrics {
  double producer_fraction;
  double total_information;
};

FewMetrics few_metrics(const ProductionGameConfig& cfg, const ProductionProfile& s);

struct FewRow {
  int n;
  Aggregation agg;
  double c;
  double k;
  double h_bar;
  double producer_fraction;  // largest over the equilibria found
  double total_information;  // at the equilibrium reaching that fraction
};

/// Per agent count: verified witness equilibria (and, for small counts,
/// every grid equilibrium). Throws std::logic_error if a witness fails.
std::vector<FewRow> few_sweep(const ProductionGameConfig& base, std::span<const int> n_list,
                              const ProductionEnumOptions& opts = {});

/// n,agg,c,k,h_bar,producer_fraction,total_information_bits
void write_few_csv(std::ostream& out, std::span<const FewRow> rows);

}  // namespace cin
