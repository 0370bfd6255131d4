// Entropic vectors: joint entropies of every nonempty subset of agents.
//
// Subsets are bitmasks (bit i set <=> agent i, zero-based). A vector of
// order N stores 2^N - 1 entries indexed by mask - 1. All values are in
// bits.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cin {

inline constexpr double kTolerance = 1e-9;
inline constexpr int kMaxAgents = 16;

using AgentSet = std::uint32_t;

inline constexpr AgentSet full_set(int n) { return (AgentSet{1} << n) - 1; }
inline constexpr AgentSet singleton(int i) { return AgentSet{1} << i; }
inline constexpr bool contains(AgentSet s, int i) { return (s >> i) & 1U; }
int popcount(AgentSet s);

/// Nonempty subset of agents, checked against the agent count on creation.
class SubsetId {
 public:
  SubsetId(AgentSet mask, int n_agents);
  static SubsetId of(std::initializer_list<int> agents, int n_agents);

  AgentSet mask() const { return mask_; }
  int size() const { return popcount(mask_); }

  friend bool operator==(SubsetId, SubsetId) = default;

 private:
  AgentSet mask_;
};

class EntropicVector {
 public:
  /// `entries[mask - 1]` is H(X_mask). Only length and finiteness are
  /// checked here; see validate_shannon for the polymatroid axioms.
  EntropicVector(int n_agents, std::vector<double> entries);

  int n_agents() const { return n_agents_; }
  AgentSet all() const { return full_set(n_agents_); }

  /// H of the subset; the empty set maps to 0.
  double operator()(AgentSet mask) const {
    return mask == 0 ? 0.0 : entries_[mask - 1];
  }
  double operator()(SubsetId s) const { return entries_[s.mask() - 1]; }
  double joint() const { return entries_.back(); }

  std::span<const double> entries() const { return entries_; }

 private:
  int n_agents_;
  std::vector<double> entries_;
};

/// Probability table over outcome tuples, row-major with the last agent
/// varying fastest.
class JointPmf {
 public:
  JointPmf(std::vector<int> alphabet_sizes, std::vector<double> probabilities);

  int n_agents() const { return static_cast<int>(alphabet_sizes_.size()); }
  const std::vector<int>& alphabet_sizes() const { return alphabet_sizes_; }
  const std::vector<double>& probabilities() const { return probabilities_; }

 private:
  std::vector<int> alphabet_sizes_;
  std::vector<double> probabilities_;
};

EntropicVector from_joint_pmf(const JointPmf& pmf);

struct ShannonViolation {
  enum class Kind { kNonnegativity, kMonotonicity, kSubmodularity };
  Kind kind;
  // Nonnegativity: `a` is the subset. Monotonicity: H(a) <= H(b) with a
  // a proper subset of b. Submodularity: H(a) + H(b) >= H(a|b) + H(a&b).
  AgentSet a = 0;
  AgentSet b = 0;
  double slack = 0.0;  // negative amount by which the inequality fails

  std::string describe() const;
};

struct ShannonReport {
  std::vector<ShannonViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks nonnegativity plus the elemental Shannon inequalities, which
/// generate every monotonicity and submodularity constraint. An empty report
/// means the vector lies in the Shannon outer bound (not necessarily in the
/// entropic region itself for N >= 4).
ShannonReport validate_shannon(const EntropicVector& ev,
                               double tolerance = kTolerance);

double subset_entropy(const EntropicVector& ev, SubsetId s);
/// H(a | b) = H(a u b) - H(b). Requires disjoint subsets.
double cond_entropy(const EntropicVector& ev, SubsetId a, SubsetId b);
/// I(a; b) = H(a) + H(b) - H(a u b). Requires disjoint subsets.
double mutual_info(const EntropicVector& ev, SubsetId a, SubsetId b);
/// Total redundancy: sum_i H(X_i) - H(X_1..X_N).
double kl_total(const EntropicVector& ev);

EntropicVector family_independent(std::span<const double> h);
EntropicVector family_max_correlated(std::span<const double> h);
/// Three agents: agent 1 independent of agents 2 and 3, I(X_2;X_3) = kl.
EntropicVector family_example1(double h1, double h2, double h3, double kl);

/// Text form: a line `n_agents,N` followed by one `mask,entropy` record per
/// subset in mask order. '#' lines are comments.
void write_entropic_vector(std::ostream& out, const EntropicVector& ev);
EntropicVector read_entropic_vector(std::istream& in);

/// CSV rows `x1,...,xN,prob`; an optional non-numeric header line is
/// skipped. Alphabet sizes are one more than the largest symbol seen.
JointPmf read_pmf_csv(std::istream& in);

}  // namespace cin
