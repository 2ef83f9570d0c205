#pragma once

#include <cstddef>
#include <span>

namespace telesched {

/// Sample mean with a normal-approximation 95% confidence half-width.
struct MeanCi {
  double mean = 0.0;
  double ci95 = 0.0;
  std::size_t n = 0;

  double lower() const { return mean - ci95; }
  double upper() const { return mean + ci95; }
};

inline constexpr double kZ95 = 1.959963984540054;

/// ci95 is 0 when fewer than two samples are given.
MeanCi mean_ci(std::span<const double> samples);

/// True when the two intervals share no point.
bool disjoint(const MeanCi& a, const MeanCi& b);

}  // namespace telesched
