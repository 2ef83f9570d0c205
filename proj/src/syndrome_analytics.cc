#include "telesched/syndrome_analytics.h"

#include <stdexcept>
#include <string>

namespace telesched {

namespace {

constexpr std::uint64_t kDirectPowLimit = 1'000'000;

}  // namespace

void NoiseParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be a positive finite rate, got " + std::to_string(gamma));
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("tau must be a positive finite period, got " + std::to_string(tau));
  }
}

double NoiseParams::round_flip_prob() const {
  validate();
  return phase_flip_prob(gamma, tau);
}

NoiseParams NoiseParams::from_flip_prob(double p, double tau) {
  if (!(p > 0.0 && p < 0.5)) {
    throw std::invalid_argument("flip probability must lie in (0, 0.5)");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("tau must be positive");
  }
  // Inverse of p = (1 - exp(-gamma * tau)) / 2.
  return NoiseParams{-std::log1p(-2.0 * p) / tau, tau};
}

void record_outcome(SyndromeHistory& history, SyndromeOutcome outcome) {
  if (outcome == SyndromeOutcome::kPlus) {
    ++history.n_plus;
  } else {
    ++history.n_minus;
  }
}

CondErrorProbs CondErrorProbs::from_flip_prob(double p) {
  CondErrorProbs probs;
  probs.p_given_plus = cond_error_given_plus(p);
  probs.p_given_minus = cond_error_given_minus(p);
  probs.factor_plus = 1.0 - 2.0 * probs.p_given_plus;
  probs.factor_minus = 1.0 - 2.0 * probs.p_given_minus;
  return probs;
}

double phase_flip_prob(double gamma, double t) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("phase_flip_prob: gamma must be positive");
  }
  if (!(t >= 0.0)) {
    throw std::invalid_argument("phase_flip_prob: duration must be non-negative");
  }
  return -std::expm1(-gamma * t) / 2.0;
}

void check_flip_prob(double p) {
  if (!(p >= 0.0 && p < 0.5)) {
    throw std::invalid_argument("flip probability must lie in [0, 0.5), got " + std::to_string(p));
  }
}

double cond_error_given_plus(double p) {
  check_flip_prob(p);
  const double q = 1.0 - p;
  const double p3 = p * p * p;
  return p3 / (q * q * q + p3);
}

double cond_error_given_minus(double p) {
  check_flip_prob(p);
  return p;
}

double plus_outcome_prob(double p) {
  check_flip_prob(p);
  const double q = 1.0 - p;
  return q * q * q + p * p * p;
}

double count_pow(double base, std::uint64_t exponent) {
  if (exponent > kDirectPowLimit) {
    return std::exp(static_cast<double>(exponent) * std::log(base));
  }
  double result = 1.0;
  while (exponent != 0) {
    if (exponent & 1U) {
      result *= base;
    }
    base *= base;
    exponent >>= 1U;
  }
  return result;
}

double parity_bias(const SyndromeHistory& history, const CondErrorProbs& per_round) {
  return count_pow(per_round.factor_plus, history.n_plus) *
         count_pow(per_round.factor_minus, history.n_minus);
}

double success_prob(const SyndromeHistory& history, const CondErrorProbs& per_round) {
  return (1.0 + parity_bias(history, per_round)) / 2.0;
}

double teleport_fidelity(const SyndromeHistory& history, const CondErrorProbs& per_round) {
  // <+| (s rho_+ + (1 - s) rho_-) |+> = s.
  return success_prob(history, per_round);
}

}  // namespace telesched
