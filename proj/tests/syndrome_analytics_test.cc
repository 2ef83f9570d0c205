#include "telesched/syndrome_analytics.h"

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "telesched/random_streams.h"

using namespace telesched;

namespace {

// Flip probability at the experimental operating point (gamma = 50 Hz, tau = 3 ms).
double operating_p() { return (1.0 - std::exp(-50.0 * 0.003)) / 2.0; }

// Independent route: enumerate every logical-flip pattern over the rounds and
// sum the probability of an even number of flips.
double brute_force_success(std::uint64_t n_plus, std::uint64_t n_minus, double p) {
  const double q_plus = std::pow(p, 3) / (std::pow(1 - p, 3) + std::pow(p, 3));
  const double q_minus = p;
  const std::uint64_t n = n_plus + n_minus;
  double even = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double prob = 1.0;
    int flips = 0;
    for (std::uint64_t r = 0; r < n; ++r) {
      const double q = r < n_plus ? q_plus : q_minus;
      const bool flip = (mask >> r) & 1U;
      prob *= flip ? q : 1 - q;
      flips += flip;
    }
    if (flips % 2 == 0) even += prob;
  }
  return even;
}

}  // namespace

TEST(PhaseFlipProb, OperatingPointMatchesReportedValue) {
  EXPECT_NEAR(phase_flip_prob(50.0, 0.003), 0.069, 0.001);
  EXPECT_DOUBLE_EQ(phase_flip_prob(50.0, 0.003), operating_p());
}

TEST(PhaseFlipProb, ZeroDurationAndLongTimeLimit) {
  EXPECT_EQ(phase_flip_prob(50.0, 0.0), 0.0);
  EXPECT_EQ(phase_flip_prob(1e-9, 0.0), 0.0);
  EXPECT_NEAR(phase_flip_prob(50.0, 10.0), 0.5, 1e-6);
}

TEST(PhaseFlipProb, MonotoneInTime) {
  double prev = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double p = phase_flip_prob(50.0, 0.0005 * i);
    EXPECT_GT(p, prev);
    EXPECT_LT(p, 0.5);
    prev = p;
  }
}

TEST(PhaseFlipProb, RejectsBadArguments) {
  EXPECT_THROW(phase_flip_prob(50.0, -1e-9), std::invalid_argument);
  EXPECT_THROW(phase_flip_prob(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(phase_flip_prob(-5.0, 1.0), std::invalid_argument);
}

TEST(CondError, GivenPlus) {
  EXPECT_NEAR(cond_error_given_plus(operating_p()), 0.00042, 5e-5);
  EXPECT_EQ(cond_error_given_plus(0.0), 0.0);
  // 0.027 / (0.343 + 0.027)
  EXPECT_NEAR(cond_error_given_plus(0.3), 0.072972972972972973, 1e-15);
}

TEST(CondError, GivenMinusIsIdentity) {
  EXPECT_EQ(cond_error_given_minus(operating_p()), operating_p());
  EXPECT_EQ(cond_error_given_minus(0.0), 0.0);
  EXPECT_EQ(cond_error_given_minus(0.25), 0.25);
}

TEST(CondError, RejectsOutsideCorrectableRegime) {
  for (double p : {-0.01, 0.5, 0.7, std::numeric_limits<double>::quiet_NaN()}) {
    EXPECT_THROW(cond_error_given_plus(p), std::invalid_argument) << p;
    EXPECT_THROW(cond_error_given_minus(p), std::invalid_argument) << p;
    EXPECT_THROW(CondErrorProbs::from_flip_prob(p), std::invalid_argument) << p;
  }
}

TEST(CondError, PlusStrictlyBelowMinusInsideRegime) {
  EXPECT_EQ(cond_error_given_plus(0.0), cond_error_given_minus(0.0));
  for (int i = 1; i < 500; ++i) {
    const double p = i / 1000.0;
    const auto probs = CondErrorProbs::from_flip_prob(p);
    EXPECT_LT(probs.p_given_plus, probs.p_given_minus) << p;
    EXPECT_GT(probs.factor_minus, 0.0);
    EXPECT_LT(probs.factor_minus, probs.factor_plus);
    EXPECT_LT(probs.factor_plus, 1.0);
  }
}

TEST(SuccessProb, ReportedStepValues) {
  const auto probs = CondErrorProbs::from_flip_prob(operating_p());
  EXPECT_EQ(success_prob({0, 0}, probs), 1.0);
  EXPECT_NEAR(success_prob({0, 1}, probs), 0.93, 0.005);
  EXPECT_NEAR(success_prob({0, 2}, probs), 0.87, 0.005);
}

TEST(SuccessProb, FreshnessComparison) {
  const auto probs = CondErrorProbs::from_flip_prob(operating_p());
  EXPECT_NEAR(success_prob({5, 0}, probs), 0.9979, 1e-4);
  EXPECT_NEAR(success_prob({3, 1}, probs), 0.9292, 1e-4);
  EXPECT_GT(success_prob({5, 0}, probs), success_prob({3, 1}, probs));
}

TEST(SuccessProb, MatchesExhaustiveParityEnumeration) {
  for (double p : {0.05, 0.069, operating_p(), 0.2, 0.4}) {
    const auto probs = CondErrorProbs::from_flip_prob(p);
    for (std::uint64_t n = 0; n <= 8; ++n) {
      for (std::uint64_t minus = 0; minus <= n; ++minus) {
        EXPECT_NEAR(success_prob({n - minus, minus}, probs), brute_force_success(n - minus, minus, p), 1e-12)
            << "p=" << p << " a=" << n - minus << " b=" << minus;
      }
    }
  }
}

TEST(SuccessProb, MonotoneAndBounded) {
  std::mt19937_64 rng(7);
  // Kept where the bias stays well above double rounding near 1.
  std::uniform_real_distribution<double> p_dist(0.001, 0.3);
  std::uniform_int_distribution<std::uint64_t> count(0, 12);
  for (int trial = 0; trial < 2000; ++trial) {
    const double p = p_dist(rng);
    const auto probs = CondErrorProbs::from_flip_prob(p);
    const SyndromeHistory h{count(rng), count(rng)};
    const double s = success_prob(h, probs);
    EXPECT_GT(s, 0.5);
    EXPECT_LE(s, 1.0);
    if (h.rounds() > 0) EXPECT_LT(s, 1.0);
    const double more_minus = success_prob({h.n_plus, h.n_minus + 1}, probs);
    const double more_plus = success_prob({h.n_plus + 1, h.n_minus}, probs);
    EXPECT_LT(more_minus, s);
    EXPECT_LT(more_plus, s);
    EXPECT_LT(s - more_plus, s - more_minus);
  }
}

TEST(SuccessProb, LargeCountsUseLogPath) {
  const auto probs = CondErrorProbs::from_flip_prob(1e-4);
  const SyndromeHistory h{2'000'000, 3};
  const double expected = (1.0 + std::pow(probs.factor_plus, 2e6) * std::pow(probs.factor_minus, 3)) / 2.0;
  EXPECT_NEAR(success_prob(h, probs), expected, 1e-12);
  EXPECT_NEAR(count_pow(0.999, 1'500'000), std::pow(0.999, 1.5e6), 1e-300);
}

TEST(TeleportFidelity, EqualsSuccessProbBitForBit) {
  const auto probs = CondErrorProbs::from_flip_prob(operating_p());
  EXPECT_EQ(teleport_fidelity({0, 0}, probs), 1.0);
  for (std::uint64_t a = 0; a < 20; ++a) {
    for (std::uint64_t b = 0; b < 20; ++b) {
      EXPECT_EQ(teleport_fidelity({a, b}, probs), success_prob({a, b}, probs));
    }
  }
}

TEST(SampleSyndromeRound, NoiselessAlwaysPlus) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10000; ++i) {
    const auto s = sample_round(0.0, rng);
    EXPECT_EQ(s.outcome, SyndromeOutcome::kPlus);
    EXPECT_FALSE(s.logical_flip);
  }
}

TEST(SampleSyndromeRound, PlusFrequency) {
  constexpr int kSamples = 1'000'000;
  for (double p : {operating_p(), 0.4}) {
    const double expected = std::pow(1 - p, 3) + std::pow(p, 3);
    std::mt19937_64 rng(11);
    int plus = 0;
    for (int i = 0; i < kSamples; ++i) plus += sample_syndrome_round(p, rng) == SyndromeOutcome::kPlus;
    EXPECT_NEAR(static_cast<double>(plus) / kSamples, expected, 0.002) << p;
  }
  EXPECT_NEAR(std::pow(1 - operating_p(), 3) + std::pow(operating_p(), 3), 0.8055, 0.002);
  EXPECT_NEAR(std::pow(0.6, 3) + std::pow(0.4, 3), 0.280, 1e-12);
}

TEST(SampleSyndromeRound, ConditionalFlipRates) {
  constexpr int kSamples = 2'000'000;
  const double p = 0.2;
  SplitMix64 rng(5);
  int plus = 0, plus_flip = 0, minus = 0, minus_flip = 0;
  for (int i = 0; i < kSamples; ++i) {
    const auto s = sample_round(p, rng);
    if (s.outcome == SyndromeOutcome::kPlus) {
      ++plus;
      plus_flip += s.logical_flip;
    } else {
      ++minus;
      minus_flip += s.logical_flip;
    }
  }
  const double q_plus = cond_error_given_plus(p);
  EXPECT_NEAR(static_cast<double>(plus_flip) / plus, q_plus, 4 * std::sqrt(q_plus * (1 - q_plus) / plus));
  EXPECT_NEAR(static_cast<double>(minus_flip) / minus, p, 4 * std::sqrt(p * (1 - p) / minus));
}

TEST(NoiseParams, Validation) {
  EXPECT_THROW((NoiseParams{0.0, 0.003}.validate()), std::invalid_argument);
  EXPECT_THROW((NoiseParams{50.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((NoiseParams{50.0, 0.003}.validate()));
  const auto n = NoiseParams::from_flip_prob(0.2, 0.003);
  EXPECT_NEAR(n.round_flip_prob(), 0.2, 1e-15);
}
