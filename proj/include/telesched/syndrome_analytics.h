#pragma once

#include <cmath>
#include <cstdint>

namespace telesched {

/// Memory dephasing rate and error-correction period.
struct NoiseParams {
  double gamma = 0.0;  // decay rate in hertz (1 / T2)
  double tau = 0.0;    // seconds between syndrome rounds

  /// Throws std::invalid_argument unless gamma > 0 and tau > 0.
  void validate() const;

  /// Per-round physical flip probability p(tau).
  double round_flip_prob() const;

  /// Noise parameters whose per-round flip probability is exactly `p`.
  static NoiseParams from_flip_prob(double p, double tau);
};

/// Counts of trivial ("+1") and non-trivial ("-1") syndrome rounds.
struct SyndromeHistory {
  std::uint64_t n_plus = 0;
  std::uint64_t n_minus = 0;

  std::uint64_t rounds() const { return n_plus + n_minus; }

  friend bool operator==(const SyndromeHistory&, const SyndromeHistory&) = default;
};

enum class SyndromeOutcome : std::uint8_t { kPlus, kMinus };

void record_outcome(SyndromeHistory& history, SyndromeOutcome outcome);

/// Logical-flip probabilities for one round, conditioned on its outcome.
struct CondErrorProbs {
  double p_given_plus = 0.0;
  double p_given_minus = 0.0;
  double factor_plus = 1.0;   // 1 - 2 * p_given_plus
  double factor_minus = 1.0;  // 1 - 2 * p_given_minus

  static CondErrorProbs from_flip_prob(double p);

  double factor(SyndromeOutcome outcome) const {
    return outcome == SyndromeOutcome::kPlus ? factor_plus : factor_minus;
  }
  double flip_prob(SyndromeOutcome outcome) const {
    return outcome == SyndromeOutcome::kPlus ? p_given_plus : p_given_minus;
  }
};

/// (1 - exp(-gamma * t)) / 2. Throws for gamma <= 0 or t < 0.
double phase_flip_prob(double gamma, double t);

/// Throws std::invalid_argument unless p is in [0, 0.5).
void check_flip_prob(double p);

/// Pr[logical flip | trivial syndrome] = p^3 / ((1-p)^3 + p^3).
double cond_error_given_plus(double p);

/// Pr[logical flip | non-trivial syndrome] = p.
double cond_error_given_minus(double p);

/// Probability that a round yields the trivial syndrome: (1-p)^3 + p^3.
double plus_outcome_prob(double p);

/// base^exponent. Binary exponentiation below 1e6, exp-of-log above.
double count_pow(double base, std::uint64_t exponent);

/// Expected parity sign E[(-1)^flips] = factor_plus^n_plus * factor_minus^n_minus.
double parity_bias(const SyndromeHistory& history, const CondErrorProbs& per_round);

/// Pr[no logical error | history] = (1 + parity_bias) / 2.
double success_prob(const SyndromeHistory& history, const CondErrorProbs& per_round);

/// Fidelity of a teleported |+> with the given syndrome history; equal to
/// success_prob.
double teleport_fidelity(const SyndromeHistory& history, const CondErrorProbs& per_round);

/// Jointly sampled syndrome outcome and logical-flip event of one round.
struct RoundSample {
  SyndromeOutcome outcome = SyndromeOutcome::kPlus;
  bool logical_flip = false;
};

/// Maps 64 random bits onto [0, 1) using the top 53 bits.
inline double to_unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

template <class Urbg>
double uniform01(Urbg& rng) {
  static_assert(sizeof(typename Urbg::result_type) == 8, "expects a 64-bit generator");
  return to_unit_interval(static_cast<std::uint64_t>(rng()));
}

/// Draws the round outcome first, then the logical flip from its
/// conditional distribution. Always consumes exactly two draws.
template <class Urbg>
RoundSample sample_round(double p, Urbg& rng) {
  const double u_outcome = uniform01(rng);
  const double u_flip = uniform01(rng);
  RoundSample s;
  s.outcome = u_outcome < plus_outcome_prob(p) ? SyndromeOutcome::kPlus : SyndromeOutcome::kMinus;
  const double flip = s.outcome == SyndromeOutcome::kPlus ? cond_error_given_plus(p) : p;
  s.logical_flip = u_flip < flip;
  return s;
}

/// Outcome-only view of sample_round; the three non-trivial syndromes share
/// the kMinus label.
template <class Urbg>
SyndromeOutcome sample_syndrome_round(double p, Urbg& rng) {
  return sample_round(p, rng).outcome;
}

}  // namespace telesched
