// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "telesched/experiments.h"
#include "telesched/oracle.h"
#include "telesched/sim_engine.h"
#include "telesched/stats.h"
#include "telesched/syndrome_analytics.h"

using namespace telesched;

namespace {

int failures = 0;

void report(const char* id, bool ok, double seconds, const char* fmt, ...) {
  char detail[1024];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(detail, sizeof detail, fmt, args);
  va_end(args);
  std::printf("[%s] %s: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, detail, seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double parity_even_brute(std::uint64_t n_plus, std::uint64_t n_minus, double p) {
  const double q_plus = std::pow(p, 3) / (std::pow(1 - p, 3) + std::pow(p, 3));
  const std::uint64_t n = n_plus + n_minus;
  double even = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double prob = 1.0;
    int flips = 0;
    for (std::uint64_t r = 0; r < n; ++r) {
      const double q = r < n_plus ? q_plus : p;
      const bool flip = (mask >> r) & 1U;
      prob *= flip ? q : 1 - q;
      flips += flip;
    }
    if (flips % 2 == 0) even += prob;
  }
  return even;
}

void criterion_1() {
  Timer t;
  const double p = phase_flip_prob(50.0, 0.003);
  const double plus = cond_error_given_plus(p);
  const double minus = cond_error_given_minus(p);
  const auto probs = CondErrorProbs::from_flip_prob(p);
  const double s1 = success_prob({0, 1}, probs);
  const double s2 = success_prob({0, 2}, probs);
  const bool ok = std::abs(p - 0.069) <= 0.001 && std::abs(plus - 0.00042) <= 5e-5 && minus == p &&
                  std::abs(s1 - 0.93) <= 0.005 && std::abs(s2 - 0.87) <= 0.005;
  report("C1 numeric anchors", ok && t.seconds() < 1.0, t.seconds(),
         "p=%.6f Pr[e|+1]=%.6f Pr[e|-1]=%.6f P(0,1)=%.5f P(0,2)=%.5f", p, plus, minus, s1, s2);
}

void criterion_2() {
  Timer t;
  double worst = 0.0;
  std::uint64_t cases = 0;
  for (double p : {0.05, 0.069, 0.2, 0.4}) {
    const auto probs = CondErrorProbs::from_flip_prob(p);
    for (std::uint64_t n = 0; n <= 8; ++n) {
      for (std::uint64_t m = 0; m <= n; ++m) {
        worst = std::max(worst, std::abs(success_prob({n - m, m}, probs) - parity_even_brute(n - m, m, p)));
        ++cases;
      }
    }
  }
  report("C2 likelihood vs parity enumeration", worst <= 1e-12, t.seconds(), "%llu histories, max error %.3e",
         static_cast<unsigned long long>(cases), worst);
}

void criterion_3() {
  Timer t;
  const auto r = oracle::check_fqf_against_permutations(1000, 1, 5, 8, 0.01, 0.45, 1e-12);
  report("C3 FQF equals permutation maximum (fixed trajectories)", r.failures == 0 && t.seconds() < 60.0,
         t.seconds(), "%llu instances, %llu below maximum, worst shortfall %.3e",
         static_cast<unsigned long long>(r.instances), static_cast<unsigned long long>(r.failures),
         r.worst_shortfall);
  if (r.failures > 0) std::printf("       first counterexample: %s\n", r.first_failure.c_str());

  Timer t2;
  const auto a = oracle::check_fqf_adaptive(1000, 1, 5, 8, 0.01, 0.45, 1e-12);
  report("C3b FQF equals optimal non-anticipative policy (supplementary)", a.failures == 0, t2.seconds(),
         "%llu instances, %llu below optimum, worst shortfall %.3e", static_cast<unsigned long long>(a.instances),
         static_cast<unsigned long long>(a.failures), a.worst_shortfall);
}

void criterion_4() {
  Timer t;
  std::vector<double> grid;
  for (int i = 0; i < 25; ++i) grid.push_back(0.01 + 0.02 * i);
  const auto r = oracle::sweep_interchange(12, grid);
  const bool ok = r.non_positive == 0 && r.factor_non_positive == 0 && r.boundary_nonzero == 0 &&
                  r.max_factorization_error <= 1e-12;
  report("C4 interchange inequality", ok, t.seconds(),
         "%llu cases, %llu with n_l > n_j all positive (min %.3e), max |gap - factored/2| %.3e, "
         "%llu n_l = n_j cases exactly zero",
         static_cast<unsigned long long>(r.cases), static_cast<unsigned long long>(r.cases - r.boundary_cases),
         r.min_gap, r.max_factorization_error, static_cast<unsigned long long>(r.boundary_cases));
}

void criterion_5() {
  Timer t;
  bool ok = true;
  std::string detail;
  for (auto policy : {PolicyKind::kOqf, PolicyKind::kYqf, PolicyKind::kFqf}) {
    SimConfig c = fig2_defaults().base;
    c.policy = policy;
    c.horizon_departures = 110'000;
    c.warmup = 10'000;
    const auto m = run(c);
    const double n = static_cast<double>(m.departures.size());
    const double f = m.mean_fidelity();
    const double realized = m.mean_realized_no_error();
    const double sigma = std::sqrt(f * (1 - f) / n);
    const double z = (realized - f) / sigma;
    ok = ok && n >= 1e5 && std::abs(z) <= 3.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%s n=%.0f predicted=%.5f realized=%.5f z=%+.2f", detail.empty() ? "" : "; ",
                  std::string(policy_name(policy)).c_str(), n, f, realized, z);
    detail += buf;
  }
  report("C5 Monte-Carlo self-consistency", ok && t.seconds() < 60.0, t.seconds(), "%s", detail.c_str());
}

void criterion_6() {
  Timer t;
  auto spec = fig2_defaults();
  spec.replications = 30;
  const auto result = run_fig2(spec);
  bool steps_ok = true;
  std::string steps;
  const Fig2Policy* oqf = nullptr;
  const Fig2Policy* yqf = nullptr;
  const Fig2Policy* fqf = nullptr;
  for (const auto& p : result.policies) {
    if (p.policy == PolicyKind::kOqf) oqf = &p;
    if (p.policy == PolicyKind::kYqf) yqf = &p;
    if (p.policy == PolicyKind::kFqf) fqf = &p;
    for (const auto& s : p.steps) {
      if (s.minus_count > 2) continue;
      const bool ok = std::abs(s.location - s.target) <= 0.005 && s.window_mass >= 0.01;
      steps_ok = steps_ok && ok;
      char buf[96];
      std::snprintf(buf, sizeof buf, " %s:x=%llu@%.4f", std::string(policy_name(p.policy)).c_str(),
                    static_cast<unsigned long long>(s.minus_count), s.location);
      steps += buf;
    }
  }
  const MeanCi f{fqf->row.mean, fqf->row.ci95, 30};
  const MeanCi y{yqf->row.mean, yqf->row.ci95, 30};
  const MeanCi o{oqf->row.mean, oqf->row.ci95, 30};
  const bool order_ok = f.mean >= y.mean && y.mean >= o.mean && disjoint(f, o);
  report("C6 fidelity CDF steps and policy ordering", steps_ok && order_ok, t.seconds(),
         "FQF %.5f+-%.5f, YQF %.5f+-%.5f, OQF %.5f+-%.5f; steps%s", f.mean, f.ci95, y.mean, y.ci95, o.mean, o.ci95,
         steps.c_str());
}

void criterion_7() {
  Timer t;
  auto spec = fig1_defaults();
  spec.batch_sizes = {2, 4, 6, 8, 10};
  spec.rates = {50.0, 200.0};
  spec.replications = 4000;
  const auto result = run_fig1(spec);
  bool ok = true;
  std::string detail;
  for (double rate : spec.rates) {
    double prev = -1.0;
    char head[32];
    std::snprintf(head, sizeof head, "%sle=%g:", detail.empty() ? "" : "; ", rate);
    detail += head;
    for (const auto& g : result.gaps) {
      if (g.lambda_e != rate) continue;
      if (g.batch_size >= 4 && !(g.gap.lower() > 0.0)) ok = false;
      if (g.gap.mean < prev) ok = false;
      prev = g.gap.mean;
      char buf[64];
      std::snprintf(buf, sizeof buf, " b%llu=%.5f+-%.5f", static_cast<unsigned long long>(g.batch_size), g.gap.mean,
                    g.gap.ci95);
      detail += buf;
    }
  }
  double low = 0.0, high = 0.0;
  for (const auto& g : result.gaps) {
    if (g.batch_size == 10 && g.lambda_e == 50.0) low = g.gap.mean;
    if (g.batch_size == 10 && g.lambda_e == 200.0) high = g.gap.mean;
  }
  ok = ok && high < low;
  report("C7 batch-size sweep trends", ok, t.seconds(), "%s", detail.c_str());
}

void criterion_8() {
  Timer t;
  auto spec = fig3_defaults();
  spec.loads = {0.5, 1.1, 1.3};
  spec.replications = 30;
  const auto result = run_fig3(spec);
  auto find = [&](std::uint64_t b, double rho) -> const GapRow* {
    for (const auto& g : result.gaps) {
      if (g.batch_size == b && std::abs(g.load - rho) < 1e-9) return &g;
    }
    return nullptr;
  };
  const auto* b4_low = find(4, 0.5);
  const auto* b4_high = find(4, 1.3);
  const auto* b4_mid = find(4, 1.1);
  const auto* b1_mid = find(1, 1.1);
  if (!b4_low || !b4_high || !b4_mid || !b1_mid) {
    report("C8 load sweep trends", false, t.seconds(), "missing sweep points");
    return;
  }
  const bool ok = b4_high->gap.mean > b4_low->gap.mean &&
                  disjoint(b4_high->gap, b4_low->gap) && b4_mid->gap.mean > b1_mid->gap.mean;
  report("C8 load sweep trends", ok, t.seconds(),
         "b=4 gap rho=0.5 %.5f+-%.5f, rho=1.3 %.5f+-%.5f; rho=1.1 b=4 %.5f+-%.5f vs b=1 %.5f+-%.5f",
         b4_low->gap.mean, b4_low->gap.ci95, b4_high->gap.mean, b4_high->gap.ci95, b4_mid->gap.mean,
         b4_mid->gap.ci95, b1_mid->gap.mean, b1_mid->gap.ci95);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
