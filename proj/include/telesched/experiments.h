#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "telesched/scheduling.h"
#include "telesched/sim_engine.h"
#include "telesched/stats.h"

namespace telesched {

/// Batch-scaled system for the load sweep: EPR rate, batch size, buffer.
struct ScaledSystem {
  double lambda_e = 25.0;
  std::uint64_t batch_size = 1;
  std::size_t buffer = 5;
};

struct ExperimentSpec {
  std::string name;
  SimConfig base;
  std::vector<std::uint64_t> batch_sizes;
  std::vector<double> loads;
  std::vector<double> rates;  // EPR generation rates
  std::vector<PolicyKind> policies{PolicyKind::kOqf, PolicyKind::kYqf, PolicyKind::kFqf};
  std::vector<ScaledSystem> systems;
  std::uint64_t replications = 30;
  std::string out;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

/// Defaults for each named experiment; every field is overridable.
ExperimentSpec fig1_defaults();
ExperimentSpec fig2_defaults();
ExperimentSpec fig3_defaults();
ExperimentSpec run_defaults();

/// Condensed outcome of one replication.
struct RunSummary {
  std::uint64_t seed = 0;
  double mean_fidelity = 0.0;
  double mean_fidelity_with_drops = 0.0;
  double mean_realized_no_error = 0.0;
  double drop_rate = 0.0;
  std::uint64_t departures = 0;
  std::uint64_t pushouts = 0;
};

RunSummary summarize(const RunMetrics& metrics);

/// Seed of replication r; shared by every policy at a sweep point.
std::vector<std::uint64_t> replication_seeds(std::uint64_t base_seed, std::uint64_t replications);

/// Hex digest of a seed set.
std::string seed_digest(const std::vector<std::uint64_t>& seeds);

/// Runs fn(0..n-1) on up to `threads` workers. Results are stored by index,
/// so the output order never depends on scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// One replication per seed. `observe`, when set, sees each full RunMetrics
/// before it is condensed (called from worker threads).
std::vector<RunSummary> run_replications(const SimConfig& config, const std::vector<std::uint64_t>& seeds,
                                         unsigned threads,
                                         const std::function<void(std::size_t, const RunMetrics&)>& observe = {});

struct ResultRow {
  std::string experiment;
  std::uint64_t batch_size = 1;
  double lambda_e = 0.0;
  double lambda_r = 0.0;  // 0 for single_batch
  double load = 0.0;      // 0 for single_batch
  std::size_t buffer = kUnboundedCapacity;
  std::string policy;
  double mean = 0.0;
  double ci95 = 0.0;
  double drop_rate = 0.0;
  std::uint64_t replications = 0;
  std::uint64_t departures = 0;
  std::string seed_digest;
};

/// Paired FQF - YQF difference of per-replication means at one sweep point.
struct GapRow {
  std::string experiment;
  std::uint64_t batch_size = 1;
  double lambda_e = 0.0;
  double load = 0.0;
  std::size_t buffer = kUnboundedCapacity;
  MeanCi gap;
};

ResultRow make_row(const std::string& experiment, const SimConfig& config, const std::vector<RunSummary>& runs,
                   const std::vector<std::uint64_t>& seeds, bool score_drops_as_zero);

GapRow make_gap(const std::string& experiment, const SimConfig& config, const std::vector<RunSummary>& fqf,
                const std::vector<RunSummary>& yqf);

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<GapRow> gaps;
};

/// Single batch at t = 0 for every (b, lambda_e, policy).
SweepResult run_fig1(const ExperimentSpec& spec);

/// Mean fidelity against load for every scaled system and policy.
SweepResult run_fig3(const ExperimentSpec& spec);

/// Fixed-width histogram of fidelity values on [0.5, 1].
struct FidelityHistogram {
  static constexpr double kLow = 0.5;
  static constexpr double kBinWidth = 1e-4;
  static constexpr std::size_t kBins = 5000;

  std::vector<std::uint64_t> counts = std::vector<std::uint64_t>(kBins, 0);
  std::uint64_t total = 0;

  void add(double fidelity);
  void merge(const FidelityHistogram& other);
  double bin_center(std::size_t bin) const { return kLow + (static_cast<double>(bin) + 0.5) * kBinWidth; }
  /// Empirical CDF at x.
  double cdf(double x) const;
  /// Mass in [lo, hi).
  double mass(double lo, double hi) const;
};

/// CDF step near Pr[e'|(0, x)].
struct CdfStep {
  std::uint64_t minus_count = 0;  // x
  double target = 0.0;            // Pr[e'|(0, x)]
  double location = 0.0;          // densest bin within +-0.02 of target
  double window_mass = 0.0;       // mass within +-0.005 of target
};

CdfStep find_step(const FidelityHistogram& hist, std::uint64_t minus_count, const CondErrorProbs& per_round);

struct Fig2Policy {
  PolicyKind policy = PolicyKind::kFqf;
  ResultRow row;
  FidelityHistogram histogram;
  std::vector<CdfStep> steps;  // x = 0, 1, 2, 3
  std::vector<RunSummary> runs;
};

struct Fig2Result {
  std::vector<Fig2Policy> policies;
};

/// Stream with infinite buffer; pooled fidelity CDF per policy.
Fig2Result run_fig2(const ExperimentSpec& spec);

/// Output writers. CSV column order is fixed and listed in the manifest.
extern const std::vector<std::string> kResultColumns;
extern const std::vector<std::string> kGapColumns;
extern const std::vector<std::string> kCdfColumns;

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_gaps_csv(std::ostream& os, const std::vector<GapRow>& gaps);
/// CDF of each policy on a 0.001 grid over [0.5, 1].
void write_cdf_csv(std::ostream& os, const Fig2Result& result);

nlohmann::json manifest(const ExperimentSpec& spec, const std::vector<std::string>& columns);
nlohmann::json config_json(const SimConfig& config);

/// Minimal SVG line plot; one polyline per series.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};
void write_svg_plot(std::ostream& os, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace telesched
