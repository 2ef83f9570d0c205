#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "telesched/syndrome_analytics.h"

namespace telesched::oracle {

/// k qubits stored together at t = 0 and served at fixed EPR completion
/// times. Each qubit's syndrome outcomes are fixed in advance, one per round.
struct BatchInstance {
  NoiseParams noise;
  std::vector<double> serve_times;  // strictly increasing, all > 0
  std::vector<std::vector<SyndromeOutcome>> trajectories;

  std::size_t size() const { return trajectories.size(); }
  /// Completed rounds at time t: floor(t / tau).
  std::uint64_t rounds_at(double t) const;
  /// "-1" outcomes among the first `rounds` entries of qubit i's trajectory.
  std::uint64_t minus_count(std::size_t qubit, std::uint64_t rounds) const;
  /// Throws std::invalid_argument on malformed instances.
  void validate() const;
};

/// assignment[i] is the index of the serve time given to qubit i.
using Assignment = std::vector<std::size_t>;

/// P_s(m, n): success probability after n rounds of which m were "-1".
double batch_success(std::uint64_t minus, std::uint64_t rounds, const CondErrorProbs& per_round);

/// Sum over qubits of P_s at their assigned serve time. Throws if the
/// assignment is not a bijection onto the serve times.
double total_success(const BatchInstance& instance, std::span<const std::size_t> assignment);

/// Greedy: at each serve time, the unserved qubit with the fewest "-1"
/// outcomes so far, ties to the lowest index.
Assignment fqf_assignment(const BatchInstance& instance);

struct PermutationMax {
  double best_total = 0.0;
  Assignment best;
  std::uint64_t permutations = 0;
};

/// Exhaustive maximum of total_success over all k! assignments.
PermutationMax max_total_success(const BatchInstance& instance);

/// Expected batch totals over all non-anticipative service policies, with
/// future syndromes drawn from the noise model rather than fixed.
struct AdaptiveValues {
  double optimal = 0.0;  // best policy, by dynamic programming
  double fqf = 0.0;      // greedy fewest-"-1" policy
};

AdaptiveValues adaptive_batch_values(std::size_t k, std::span<const std::uint64_t> serve_rounds, double p);

/// Quantity whose positivity drives the interchange argument, with the
/// closed-form factorization computed independently.
struct InterchangeGap {
  // P_s(m1, nj) + P_s(m2 + m1p - m1, nl) - P_s(m2, nj) - P_s(m1p, nl); the
  // constant halves cancel exactly and are dropped before summing.
  double gap = 0.0;
  // The same four success probabilities summed literally.
  double success_sum_gap = 0.0;
  // Product of `factors`; equals 2 * gap.
  double factored = 0.0;
  std::array<double, 3> factors{};
};

/// Requires p in (0, 0.5), m1 < m2 <= nj, m1p >= m1, nl >= nj and
/// m1p - m1 <= nl - nj; throws std::invalid_argument otherwise.
InterchangeGap interchange_gap(std::uint64_t m1, std::uint64_t m2, std::uint64_t m1p, std::uint64_t nj,
                               std::uint64_t nl, double p);

/// Random instance: k in [1, max_k], serve times inside the first
/// max_rounds + 1 rounds, p uniform in (p_lo, p_hi).
BatchInstance random_instance(std::mt19937_64& rng, std::size_t max_k, std::uint64_t max_rounds, double p_lo,
                              double p_hi);

// Verification sweeps used by tests and the verify-theorem command.

struct HindsightReport {
  std::uint64_t instances = 0;
  std::uint64_t failures = 0;
  double worst_shortfall = 0.0;  // max(best - fqf) over instances
  std::string first_failure;
};

/// FQF against the hindsight maximum over permutations for fixed trajectories.
HindsightReport check_fqf_against_permutations(std::uint64_t instances, std::uint64_t seed, std::size_t max_k,
                                               std::uint64_t max_rounds, double p_lo, double p_hi,
                                               double tolerance);

struct AdaptiveReport {
  std::uint64_t instances = 0;
  std::uint64_t failures = 0;
  double worst_shortfall = 0.0;
};

/// FQF against the optimal non-anticipative policy on random serve times.
AdaptiveReport check_fqf_adaptive(std::uint64_t instances, std::uint64_t seed, std::size_t max_k,
                                  std::uint64_t max_rounds, double p_lo, double p_hi, double tolerance);

struct InterchangeReport {
  std::uint64_t cases = 0;
  std::uint64_t non_positive = 0;       // strict cases (nl > nj) with gap <= 0
  std::uint64_t factor_non_positive = 0;
  std::uint64_t boundary_cases = 0;     // nl == nj, where the gap is exactly zero
  std::uint64_t boundary_nonzero = 0;
  double min_gap = 0.0;
  double max_factorization_error = 0.0;  // |gap - factored / 2|
};

InterchangeReport sweep_interchange(std::uint64_t max_count, std::span<const double> p_values);

}  // namespace telesched::oracle
