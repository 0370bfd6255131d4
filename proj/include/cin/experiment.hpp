// Experiment specs and the batch runs behind the command-line tool. Every
// run returns its full output text; CSV outputs start with a '#' line that
// records the spec hash and the caps in force.
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cin/analytic.hpp"
#include "cin/equilibrium.hpp"
#include "cin/game.hpp"
#include "cin/key_value.hpp"
#include "cin/production.hpp"

namespace cin {

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentSpec {
  std::string text;
  std::uint64_t hash = 0;
  KeyValueDoc doc;
  /// Relative file references resolve against this directory.
  std::filesystem::path base_dir;
};

std::uint64_t fnv1a64(std::string_view text);

/// Parses and checks key names. Throws SpecError.
ExperimentSpec load_spec(std::string text, std::filesystem::path base_dir = {});
ExperimentSpec load_spec_file(const std::filesystem::path& path);

struct RunOptions {
  std::uint64_t seed = 0;
  bool seed_given = false;  // otherwise the spec's `seed` key, then 0
  unsigned threads = 1;
  int max_n = kFullScanAgents;
};

/// Builds the game described by the spec. Throws SpecError, including for
/// entropy vectors outside the Shannon outer bound.
GameConfig game_from_spec(const ExperimentSpec& spec);
ProductionGameConfig production_from_spec(const ExperimentSpec& spec);

std::string run_enumerate(const ExperimentSpec& spec, const RunOptions& opts);
std::string run_regions(const ExperimentSpec& spec, const RunOptions& opts);
std::string run_poa_sweep(const ExperimentSpec& spec, const RunOptions& opts);
std::string run_mil_sweep(const ExperimentSpec& spec, const RunOptions& opts);
std::string run_production(const ExperimentSpec& spec, const RunOptions& opts);
std::string run_few_sweep(const ExperimentSpec& spec, const RunOptions& opts);

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

struct VerifyResult {
  bool passed;
  std::string report;
};

/// Cross-checks closed forms against brute force on the spec's instance(s)
/// and on seeded random instances.
VerifyResult run_verify(const ExperimentSpec& spec, const RunOptions& opts);

/// Structural and efficiency checks for one formation game.
std::vector<CheckResult> verify_formation_instance(const GameConfig& cfg, const std::string& label,
                                                   const EnumerationOptions& opts);
/// Grid equilibria versus the structural characterization (n <= 3).
std::vector<CheckResult> verify_production_instance(const ProductionGameConfig& cfg, const std::string& label,
                                                    const ProductionEnumOptions& opts);

/// Joint pmf with random alphabet sizes in {2, 3}, flat-Dirichlet weights
/// and some zeroed cells.
JointPmf random_pmf(std::mt19937_64& rng, int n_agents);
/// Random pmf-derived game with costs drawn uniformly from [0, 2 c_u]. Vectors
/// with c_u = 0 are redrawn.
GameConfig random_game(std::mt19937_64& rng, int n_agents, CostModel::Kind kind,
                       const BenefitFunction& f = BenefitFunction::log_one_plus());

}  // namespace cin
