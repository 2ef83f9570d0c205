#include "telesched/stats.h"

#include <cmath>

namespace telesched {

MeanCi mean_ci(std::span<const double> samples) {
  MeanCi out;
  out.n = samples.size();
  if (samples.empty()) return out;
  double sum = 0.0;
  for (double x : samples) sum += x;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double x : samples) ss += (x - out.mean) * (x - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(out.n - 1));
  out.ci95 = kZ95 * sd / std::sqrt(static_cast<double>(out.n));
  return out;
}

bool disjoint(const MeanCi& a, const MeanCi& b) { return a.upper() < b.lower() || b.upper() < a.lower(); }

}  // namespace telesched
