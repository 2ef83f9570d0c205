#include "telesched/oracle.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "telesched/random_streams.h"

namespace telesched::oracle {

std::uint64_t BatchInstance::rounds_at(double t) const {
  return static_cast<std::uint64_t>(std::floor(t / noise.tau));
}

std::uint64_t BatchInstance::minus_count(std::size_t qubit, std::uint64_t rounds) const {
  const auto& traj = trajectories.at(qubit);
  if (rounds > traj.size()) {
    throw std::invalid_argument("trajectory shorter than requested round count");
  }
  return static_cast<std::uint64_t>(
      std::count(traj.begin(), traj.begin() + static_cast<std::ptrdiff_t>(rounds), SyndromeOutcome::kMinus));
}

void BatchInstance::validate() const {
  noise.validate();
  if (trajectories.empty()) {
    throw std::invalid_argument("batch instance needs at least one qubit");
  }
  if (serve_times.size() != trajectories.size()) {
    throw std::invalid_argument("need exactly one serve time per qubit");
  }
  for (std::size_t j = 0; j < serve_times.size(); ++j) {
    if (!(serve_times[j] > 0.0) || (j > 0 && !(serve_times[j] > serve_times[j - 1]))) {
      throw std::invalid_argument("serve times must be positive and strictly increasing");
    }
  }
  const auto needed = rounds_at(serve_times.back());
  for (const auto& traj : trajectories) {
    if (traj.size() < needed) {
      throw std::invalid_argument("trajectory does not cover the last serve time");
    }
  }
}

double batch_success(std::uint64_t minus, std::uint64_t rounds, const CondErrorProbs& per_round) {
  if (minus > rounds) {
    throw std::invalid_argument("more '-1' outcomes than rounds");
  }
  return success_prob(SyndromeHistory{rounds - minus, minus}, per_round);
}

double total_success(const BatchInstance& instance, std::span<const std::size_t> assignment) {
  instance.validate();
  const std::size_t k = instance.size();
  if (assignment.size() != k) {
    throw std::invalid_argument("assignment size differs from batch size");
  }
  std::vector<bool> used(k, false);
  for (const auto slot : assignment) {
    if (slot >= k || used[slot]) {
      throw std::invalid_argument("assignment is not a bijection onto serve times");
    }
    used[slot] = true;
  }
  const auto per_round = CondErrorProbs::from_flip_prob(instance.noise.round_flip_prob());
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto n = instance.rounds_at(instance.serve_times[assignment[i]]);
    total += batch_success(instance.minus_count(i, n), n, per_round);
  }
  return total;
}

Assignment fqf_assignment(const BatchInstance& instance) {
  instance.validate();
  const std::size_t k = instance.size();
  Assignment assignment(k, 0);
  std::vector<bool> served(k, false);
  for (std::size_t j = 0; j < k; ++j) {
    const auto n = instance.rounds_at(instance.serve_times[j]);
    std::size_t pick = k;
    std::uint64_t pick_minus = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (served[i]) continue;
      const auto m = instance.minus_count(i, n);
      if (pick == k || m < pick_minus) {
        pick = i;
        pick_minus = m;
      }
    }
    served[pick] = true;
    assignment[pick] = j;
  }
  return assignment;
}

PermutationMax max_total_success(const BatchInstance& instance) {
  instance.validate();
  Assignment perm(instance.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  PermutationMax result;
  do {
    const double total = total_success(instance, perm);
    if (result.permutations == 0 || total > result.best_total) {
      result.best_total = total;
      result.best = perm;
    }
    ++result.permutations;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return result;
}

namespace {

// Dynamic program over sorted multisets of "-1" counts of the unserved
// qubits. Future outcomes are i.i.d. per qubit and round, so the state is
// sufficient.
class AdaptiveSolver {
 public:
  AdaptiveSolver(std::span<const std::uint64_t> serve_rounds, double p)
      : rounds_(serve_rounds.begin(), serve_rounds.end()),
        per_round_(CondErrorProbs::from_flip_prob(p)),
        q_minus_(1.0 - plus_outcome_prob(p)) {}

  double value(std::size_t k, bool greedy) {
    greedy_ = greedy;
    memo_pre_.clear();
    memo_post_.clear();
    return before_serving(0, std::vector<std::uint64_t>(k, 0));
  }

 private:
  using Key = std::pair<std::size_t, std::vector<std::uint64_t>>;

  // Expectation over the rounds between the previous serve time and slot j.
  double before_serving(std::size_t slot, std::vector<std::uint64_t> minus) {
    Key key{slot, minus};
    if (auto it = memo_pre_.find(key); it != memo_pre_.end()) return it->second;
    const std::uint64_t prev = slot == 0 ? 0 : rounds_[slot - 1];
    const std::uint64_t delta = rounds_[slot] - prev;
    const auto pmf = binomial_pmf(delta);
    double expected = 0.0;
    std::vector<std::uint64_t> next(minus.size());
    // Odometer over per-qubit increments.
    std::vector<std::uint64_t> inc(minus.size(), 0);
    while (true) {
      double weight = 1.0;
      for (std::size_t i = 0; i < minus.size(); ++i) {
        weight *= pmf[inc[i]];
        next[i] = minus[i] + inc[i];
      }
      std::vector<std::uint64_t> sorted = next;
      std::sort(sorted.begin(), sorted.end());
      expected += weight * after_increments(slot, std::move(sorted));
      std::size_t pos = 0;
      while (pos < inc.size() && inc[pos] == delta) inc[pos++] = 0;
      if (pos == inc.size()) break;
      ++inc[pos];
    }
    memo_pre_.emplace(std::move(key), expected);
    return expected;
  }

  // Serve one qubit at slot j given current counts (sorted ascending).
  double after_increments(std::size_t slot, std::vector<std::uint64_t> minus) {
    Key key{slot, minus};
    if (auto it = memo_post_.find(key); it != memo_post_.end()) return it->second;
    const std::uint64_t n = rounds_[slot];
    double best = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < minus.size(); ++i) {
      if (i > 0 && minus[i] == minus[i - 1]) continue;  // identical choice
      double v = batch_success(minus[i], n, per_round_);
      if (slot + 1 < rounds_.size()) {
        std::vector<std::uint64_t> rest = minus;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        v += before_serving(slot + 1, std::move(rest));
      }
      if (first || v > best) {
        best = v;
        first = false;
      }
      if (greedy_) break;  // sorted: index 0 holds the fewest "-1"s
    }
    memo_post_.emplace(std::move(key), best);
    return best;
  }

  std::vector<double> binomial_pmf(std::uint64_t trials) const {
    std::vector<double> pmf(trials + 1, 0.0);
    for (std::uint64_t x = 0; x <= trials; ++x) {
      double c = 1.0;
      for (std::uint64_t i = 0; i < x; ++i) c = c * static_cast<double>(trials - i) / static_cast<double>(i + 1);
      pmf[x] = c * std::pow(q_minus_, static_cast<double>(x)) *
               std::pow(1.0 - q_minus_, static_cast<double>(trials - x));
    }
    return pmf;
  }

  std::vector<std::uint64_t> rounds_;
  CondErrorProbs per_round_;
  double q_minus_;
  bool greedy_ = false;
  std::map<Key, double> memo_pre_;
  std::map<Key, double> memo_post_;
};

}  // namespace

AdaptiveValues adaptive_batch_values(std::size_t k, std::span<const std::uint64_t> serve_rounds, double p) {
  if (k == 0 || serve_rounds.size() != k) {
    throw std::invalid_argument("need one serve round count per qubit");
  }
  if (!std::is_sorted(serve_rounds.begin(), serve_rounds.end())) {
    throw std::invalid_argument("serve round counts must be non-decreasing");
  }
  check_flip_prob(p);
  AdaptiveSolver solver(serve_rounds, p);
  AdaptiveValues out;
  out.optimal = solver.value(k, false);
  out.fqf = solver.value(k, true);
  return out;
}

InterchangeGap interchange_gap(std::uint64_t m1, std::uint64_t m2, std::uint64_t m1p, std::uint64_t nj,
                               std::uint64_t nl, double p) {
  if (!(p > 0.0 && p < 0.5)) {
    throw std::invalid_argument("interchange_gap: p must lie in (0, 0.5)");
  }
  if (!(m1 < m2)) throw std::invalid_argument("interchange_gap: requires m1 < m2");
  if (m2 > nj) throw std::invalid_argument("interchange_gap: requires m2 <= nj");
  if (m1p < m1) throw std::invalid_argument("interchange_gap: requires m1p >= m1");
  if (nl < nj) throw std::invalid_argument("interchange_gap: requires nl >= nj");
  if (m1p - m1 > nl - nj) throw std::invalid_argument("interchange_gap: more '-1's than rounds");

  const auto probs = CondErrorProbs::from_flip_prob(p);
  const double a = probs.factor_minus;
  const double b = probs.factor_plus;
  // a^m b^(n-m), the non-constant part of 2 * P_s(m, n).
  auto bias = [&](std::uint64_t m, std::uint64_t n) { return count_pow(a, m) * count_pow(b, n - m); };

  InterchangeGap out;
  const std::uint64_t m2_later = m2 + m1p - m1;
  out.gap = ((bias(m1, nj) - bias(m2, nj)) + (bias(m2_later, nl) - bias(m1p, nl))) / 2.0;
  out.success_sum_gap = batch_success(m1, nj, probs) + batch_success(m2_later, nl, probs) -
                        batch_success(m2, nj, probs) - batch_success(m1p, nl, probs);
  out.factors[0] = count_pow(a, m1) * count_pow(b, nj - m2);
  out.factors[1] = count_pow(b, m2 - m1) - count_pow(a, m2 - m1);
  out.factors[2] = 1.0 - count_pow(a, m1p - m1) * count_pow(b, nl - nj - (m1p - m1));
  out.factored = out.factors[0] * out.factors[1] * out.factors[2];
  return out;
}

BatchInstance random_instance(std::mt19937_64& rng, std::size_t max_k, std::uint64_t max_rounds, double p_lo,
                              double p_hi) {
  std::uniform_int_distribution<std::size_t> k_dist(1, max_k);
  const std::size_t k = k_dist(rng);
  const double p = p_lo + (p_hi - p_lo) * uniform01(rng);
  constexpr double kTau = 0.003;

  BatchInstance inst;
  inst.noise = NoiseParams::from_flip_prob(p, kTau);
  // Serve times fall strictly inside (0, (max_rounds + 1) * tau), so at most
  // max_rounds rounds complete before the last one.
  while (inst.serve_times.size() < k) {
    const double u = uniform01(rng);
    if (u == 0.0) continue;
    const double t = u * static_cast<double>(max_rounds + 1) * kTau;
    if (std::find(inst.serve_times.begin(), inst.serve_times.end(), t) == inst.serve_times.end()) {
      inst.serve_times.push_back(t);
    }
  }
  std::sort(inst.serve_times.begin(), inst.serve_times.end());
  const double realized_p = inst.noise.round_flip_prob();
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<SyndromeOutcome> traj;
    for (std::uint64_t r = 0; r < max_rounds; ++r) traj.push_back(sample_syndrome_round(realized_p, rng));
    inst.trajectories.push_back(std::move(traj));
  }
  return inst;
}

namespace {

std::string describe(const BatchInstance& inst, const Assignment& fqf, double fqf_total,
                     const PermutationMax& best) {
  std::ostringstream os;
  os.precision(6);
  os << "p=" << inst.noise.round_flip_prob() << " serve_rounds=[";
  for (std::size_t j = 0; j < inst.size(); ++j) os << (j ? "," : "") << inst.rounds_at(inst.serve_times[j]);
  os << "] trajectories=[";
  for (std::size_t i = 0; i < inst.size(); ++i) {
    os << (i ? " " : "");
    for (auto o : inst.trajectories[i]) os << (o == SyndromeOutcome::kPlus ? '+' : '-');
  }
  os << "] fqf=[";
  for (std::size_t i = 0; i < fqf.size(); ++i) os << (i ? "," : "") << fqf[i];
  os << "] total=" << fqf_total << " best=[";
  for (std::size_t i = 0; i < best.best.size(); ++i) os << (i ? "," : "") << best.best[i];
  os << "] total=" << best.best_total;
  return os.str();
}

}  // namespace

HindsightReport check_fqf_against_permutations(std::uint64_t instances, std::uint64_t seed, std::size_t max_k,
                                               std::uint64_t max_rounds, double p_lo, double p_hi,
                                               double tolerance) {
  auto rng = make_engine(seed, StreamTag::kOracleInstances);
  HindsightReport report;
  for (std::uint64_t n = 0; n < instances; ++n) {
    const auto inst = random_instance(rng, max_k, max_rounds, p_lo, p_hi);
    const auto fqf = fqf_assignment(inst);
    const double fqf_total = total_success(inst, fqf);
    const auto best = max_total_success(inst);
    const double shortfall = best.best_total - fqf_total;
    report.worst_shortfall = std::max(report.worst_shortfall, shortfall);
    if (shortfall > tolerance) {
      if (report.failures == 0) report.first_failure = describe(inst, fqf, fqf_total, best);
      ++report.failures;
    }
    ++report.instances;
  }
  return report;
}

AdaptiveReport check_fqf_adaptive(std::uint64_t instances, std::uint64_t seed, std::size_t max_k,
                                  std::uint64_t max_rounds, double p_lo, double p_hi, double tolerance) {
  auto rng = make_engine(seed, StreamTag::kOracleInstances);
  AdaptiveReport report;
  for (std::uint64_t n = 0; n < instances; ++n) {
    const auto inst = random_instance(rng, max_k, max_rounds, p_lo, p_hi);
    std::vector<std::uint64_t> serve_rounds;
    for (double t : inst.serve_times) serve_rounds.push_back(inst.rounds_at(t));
    const auto values = adaptive_batch_values(inst.size(), serve_rounds, inst.noise.round_flip_prob());
    const double shortfall = values.optimal - values.fqf;
    report.worst_shortfall = std::max(report.worst_shortfall, shortfall);
    if (shortfall > tolerance) ++report.failures;
    ++report.instances;
  }
  return report;
}

InterchangeReport sweep_interchange(std::uint64_t max_count, std::span<const double> p_values) {
  InterchangeReport report;
  bool first = true;
  for (const double p : p_values) {
    for (std::uint64_t nj = 1; nj <= max_count; ++nj) {
      for (std::uint64_t nl = nj; nl <= max_count; ++nl) {
        for (std::uint64_t m1 = 0; m1 < nj; ++m1) {
          for (std::uint64_t m2 = m1 + 1; m2 <= nj; ++m2) {
            for (std::uint64_t m1p = m1; m1p - m1 <= nl - nj; ++m1p) {
              const auto g = interchange_gap(m1, m2, m1p, nj, nl, p);
              ++report.cases;
              report.max_factorization_error =
                  std::max(report.max_factorization_error, std::abs(g.gap - g.factored / 2.0));
              if (nl == nj) {
                ++report.boundary_cases;
                if (g.gap != 0.0) ++report.boundary_nonzero;
                continue;
              }
              if (!(g.gap > 0.0)) ++report.non_positive;
              if (!(g.factors[0] > 0.0 && g.factors[1] > 0.0 && g.factors[2] > 0.0)) {
                ++report.factor_non_positive;
              }
              if (first || g.gap < report.min_gap) {
                report.min_gap = g.gap;
                first = false;
              }
            }
          }
        }
      }
    }
  }
  return report;
}

}  // namespace telesched::oracle
