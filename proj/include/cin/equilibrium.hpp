// Brute-force equilibrium machinery for the link-formation game: best
// responses, Nash and strict Nash enumeration, the social optimum, price of
// anarchy and maximum information loss.
#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cin/game.hpp"

namespace cin {

/// Largest agent count scanned exhaustively without pruning.
inline constexpr int kFullScanAgents = 5;

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerationOptions {
  /// Requests with more agents throw CapExceeded.
  int max_agents = kFullScanAgents;
  unsigned threads = 1;
  /// A deviation refutes an equilibrium only if it gains more than this.
  double tolerance = kTolerance;
  /// Drop rows that cost more than the most an agent could gain, and
  /// profiles holding a positive-cost duplicate link pair. Always on above
  /// kFullScanAgents.
  bool prune = false;
};

/// All rows of agent i that maximize its utility against the other rows of
/// p (agent i's own row in p is ignored). Ties within the tolerance are
/// included. Rows are returned in bitstring order.
std::vector<AgentSet> best_responses(const GameConfig& cfg, const LinkProfile& p, int i,
                                     const EnumerationOptions& opts = {});

bool is_nash(const GameConfig& cfg, const LinkProfile& p, double tolerance = kTolerance);
bool is_strict_nash(const GameConfig& cfg, const LinkProfile& p, double tolerance = kTolerance);

struct NashSet {
  std::vector<LinkProfile> profiles;  // bitstring order
  std::vector<bool> strict;           // aligned with `profiles`
};

NashSet enumerate_nash(const GameConfig& cfg, const EnumerationOptions& opts = {});

struct SocialOptimum {
  double value;
  LinkProfile profile;
};

/// Maximum welfare, searched over undirected forests with each edge paid
/// by its cheaper endpoint. Removing a cycle edge never lowers welfare when
/// costs are nonnegative, so this covers the whole profile space.
SocialOptimum social_optimum(const GameConfig& cfg, const EnumerationOptions& opts = {});
/// Same value by scanning every profile. Intended for N <= 4.
SocialOptimum social_optimum_exhaustive(const GameConfig& cfg, const EnumerationOptions& opts = {});

/// Optimum welfare over the worst equilibrium welfare; empty when the worst
/// equilibrium welfare is not positive.
std::optional<double> price_of_anarchy(const GameConfig& cfg, const NashSet& ne,
                                       const SocialOptimum& opt);
std::optional<double> price_of_anarchy(const GameConfig& cfg, const EnumerationOptions& opts = {});

/// max_i (max over equilibria of H(X_{i u R_i}) - min over equilibria).
double max_information_loss(const GameConfig& cfg, const NashSet& ne);
double max_information_loss(const GameConfig& cfg, const EnumerationOptions& opts = {});

struct EquilibriumReport {
  std::vector<LinkProfile> ne_profiles;
  std::vector<LinkProfile> strict_ne_profiles;
  std::vector<double> ne_welfare;  // aligned with ne_profiles
  std::vector<bool> ne_strict;     // aligned with ne_profiles
  double social_optimum_value = 0.0;
  std::optional<LinkProfile> social_optimum_profile;
  double worst_ne_welfare = 0.0;
  std::optional<double> poa;
  double mil = 0.0;
};

EquilibriumReport analyze_equilibria(const GameConfig& cfg, const EnumerationOptions& opts = {});

void write_report_text(std::ostream& out, const GameConfig& cfg, const EquilibriumReport& r);
/// One row per equilibrium: profile,welfare,info_1..info_N,strict
void write_report_csv(std::ostream& out, const GameConfig& cfg, const EquilibriumReport& r);

}  // namespace cin
