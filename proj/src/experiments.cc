#include "telesched/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "telesched/random_streams.h"

namespace telesched {

namespace {

std::string fmt_double(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

std::string fmt_buffer(std::size_t buffer) {
  return buffer == kUnboundedCapacity ? std::string("inf") : std::to_string(buffer);
}

bool has_policy(const ExperimentSpec& spec, PolicyKind policy) {
  return std::find(spec.policies.begin(), spec.policies.end(), policy) != spec.policies.end();
}

}  // namespace

void ExperimentSpec::validate() const {
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (policies.empty()) throw std::invalid_argument("at least one policy is required");
  if (name == "fig1" && (batch_sizes.empty() || rates.empty())) {
    throw std::invalid_argument("fig1 needs non-empty batch size and rate lists");
  }
  if (name == "fig3" && (loads.empty() || systems.empty())) {
    throw std::invalid_argument("fig3 needs non-empty load and system lists");
  }
  for (double rho : loads) {
    if (!(rho > 0.0)) throw std::invalid_argument("loads must be positive");
  }
  base.validate();
}

ExperimentSpec fig1_defaults() {
  ExperimentSpec spec;
  spec.name = "fig1";
  spec.base.scenario = Scenario::kSingleBatch;
  spec.base.noise = NoiseParams{50.0, 0.003};
  spec.base.batch_order = BatchOrder::kRandom;
  spec.batch_sizes = {1, 2, 4, 6, 8, 10};
  spec.rates = {50.0, 200.0};
  spec.policies = {PolicyKind::kYqf, PolicyKind::kFqf};
  spec.replications = 2000;
  return spec;
}

ExperimentSpec fig2_defaults() {
  ExperimentSpec spec;
  spec.name = "fig2";
  spec.base.scenario = Scenario::kStream;
  spec.base.lambda_r = 90.0;
  spec.base.lambda_e = 100.0;
  spec.base.noise = NoiseParams{50.0, 0.003};
  spec.base.buffer = kUnboundedCapacity;
  spec.base.horizon_departures = 100'000;
  spec.policies = {PolicyKind::kOqf, PolicyKind::kYqf, PolicyKind::kFqf};
  spec.replications = 30;
  return spec;
}

ExperimentSpec fig3_defaults() {
  ExperimentSpec spec;
  spec.name = "fig3";
  spec.base.scenario = Scenario::kBatchedStream;
  spec.base.noise = NoiseParams{50.0, 0.003};
  spec.base.batch_order = BatchOrder::kRandom;
  spec.base.horizon_departures = 100'000;
  spec.loads = {0.5, 0.7, 0.9, 1.1, 1.3, 1.5};
  spec.systems = {ScaledSystem{25.0, 1, 5}, ScaledSystem{100.0, 4, 20}};
  spec.policies = {PolicyKind::kYqf, PolicyKind::kFqf};
  spec.replications = 30;
  return spec;
}

ExperimentSpec run_defaults() {
  ExperimentSpec spec;
  spec.name = "run";
  spec.policies = {PolicyKind::kFqf};
  spec.replications = 1;
  return spec;
}

RunSummary summarize(const RunMetrics& metrics) {
  RunSummary s;
  s.seed = metrics.seed;
  s.mean_fidelity = metrics.mean_fidelity(false);
  s.mean_fidelity_with_drops = metrics.mean_fidelity(true);
  s.mean_realized_no_error = metrics.mean_realized_no_error();
  s.drop_rate = metrics.drop_rate();
  s.departures = metrics.departures.size();
  s.pushouts = metrics.pushouts_after_warmup;
  return s;
}

std::vector<std::uint64_t> replication_seeds(std::uint64_t base_seed, std::uint64_t replications) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(replications);
  for (std::uint64_t r = 0; r < replications; ++r) {
    seeds.push_back(derive_seed(base_seed, StreamTag::kReplication, r));
  }
  return seeds;
}

std::string seed_digest(const std::vector<std::uint64_t>& seeds) {
  std::uint64_t h = mix64(seeds.size());
  for (auto s : seeds) h = mix64(h ^ s);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  unsigned workers = threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<RunSummary> run_replications(const SimConfig& config, const std::vector<std::uint64_t>& seeds,
                                         unsigned threads,
                                         const std::function<void(std::size_t, const RunMetrics&)>& observe) {
  std::vector<RunSummary> out(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t r) {
    SimConfig c = config;
    c.seed = seeds[r];
    const RunMetrics m = run(c);
    if (observe) observe(r, m);
    out[r] = summarize(m);
  });
  return out;
}

ResultRow make_row(const std::string& experiment, const SimConfig& config, const std::vector<RunSummary>& runs,
                   const std::vector<std::uint64_t>& seeds, bool score_drops_as_zero) {
  ResultRow row;
  row.experiment = experiment;
  row.batch_size = config.batch_size;
  row.lambda_e = config.lambda_e;
  if (config.scenario != Scenario::kSingleBatch) {
    row.lambda_r = config.lambda_r;
    row.load = load(config);
  }
  row.buffer = config.buffer;
  row.policy = std::string(policy_name(config.policy));
  std::vector<double> means;
  std::vector<double> drops;
  for (const auto& r : runs) {
    means.push_back(score_drops_as_zero ? r.mean_fidelity_with_drops : r.mean_fidelity);
    drops.push_back(r.drop_rate);
    row.departures += r.departures;
  }
  const auto m = mean_ci(means);
  row.mean = m.mean;
  row.ci95 = m.ci95;
  row.drop_rate = mean_ci(drops).mean;
  row.replications = runs.size();
  row.seed_digest = seed_digest(seeds);
  return row;
}

GapRow make_gap(const std::string& experiment, const SimConfig& config, const std::vector<RunSummary>& fqf,
                const std::vector<RunSummary>& yqf) {
  if (fqf.size() != yqf.size()) throw std::invalid_argument("gap needs paired replications");
  std::vector<double> diff;
  for (std::size_t r = 0; r < fqf.size(); ++r) {
    const bool zero = config.score_drops_as_zero;
    diff.push_back((zero ? fqf[r].mean_fidelity_with_drops : fqf[r].mean_fidelity) -
                   (zero ? yqf[r].mean_fidelity_with_drops : yqf[r].mean_fidelity));
  }
  GapRow g;
  g.experiment = experiment;
  g.batch_size = config.batch_size;
  g.lambda_e = config.lambda_e;
  g.load = config.scenario == Scenario::kSingleBatch ? 0.0 : load(config);
  g.buffer = config.buffer;
  g.gap = mean_ci(diff);
  return g;
}

namespace {

// Runs every policy at one sweep point on a shared seed set.
void run_point(const ExperimentSpec& spec, const SimConfig& point, SweepResult& result) {
  const auto seeds = replication_seeds(spec.base.seed, spec.replications);
  std::vector<RunSummary> fqf;
  std::vector<RunSummary> yqf;
  for (const auto policy : spec.policies) {
    SimConfig c = point;
    c.policy = policy;
    auto runs = run_replications(c, seeds, spec.threads);
    result.rows.push_back(make_row(spec.name, c, runs, seeds, c.score_drops_as_zero));
    if (policy == PolicyKind::kFqf) fqf = std::move(runs);
    if (policy == PolicyKind::kYqf) yqf = std::move(runs);
  }
  if (has_policy(spec, PolicyKind::kFqf) && has_policy(spec, PolicyKind::kYqf)) {
    result.gaps.push_back(make_gap(spec.name, point, fqf, yqf));
  }
}

}  // namespace

SweepResult run_fig1(const ExperimentSpec& spec) {
  spec.validate();
  SweepResult result;
  for (const double rate : spec.rates) {
    for (const auto b : spec.batch_sizes) {
      SimConfig c = spec.base;
      c.scenario = Scenario::kSingleBatch;
      c.batch_size = b;
      c.lambda_e = rate;
      c.buffer = std::max<std::size_t>(c.buffer, b);
      run_point(spec, c, result);
    }
  }
  return result;
}

SweepResult run_fig3(const ExperimentSpec& spec) {
  spec.validate();
  SweepResult result;
  for (const auto& sys : spec.systems) {
    for (const double rho : spec.loads) {
      SimConfig c = spec.base;
      c.scenario = Scenario::kBatchedStream;
      c.lambda_e = sys.lambda_e;
      c.batch_size = sys.batch_size;
      c.buffer = sys.buffer;
      c.lambda_r = rho * sys.lambda_e / static_cast<double>(sys.batch_size);
      run_point(spec, c, result);
    }
  }
  return result;
}

void FidelityHistogram::add(double fidelity) {
  const double pos = (fidelity - kLow) / kBinWidth;
  const auto bin = pos <= 0.0 ? std::size_t{0} : std::min(kBins - 1, static_cast<std::size_t>(pos));
  ++counts[bin];
  ++total;
}

void FidelityHistogram::merge(const FidelityHistogram& other) {
  for (std::size_t i = 0; i < kBins; ++i) counts[i] += other.counts[i];
  total += other.total;
}

double FidelityHistogram::cdf(double x) const {
  if (total == 0) return 0.0;
  std::uint64_t below = 0;
  for (std::size_t i = 0; i < kBins; ++i) {
    // A bin counts once its upper edge is at or below x.
    if (kLow + static_cast<double>(i + 1) * kBinWidth <= x + 1e-12) below += counts[i];
  }
  return static_cast<double>(below) / static_cast<double>(total);
}

double FidelityHistogram::mass(double lo, double hi) const {
  if (total == 0) return 0.0;
  std::uint64_t in = 0;
  for (std::size_t i = 0; i < kBins; ++i) {
    const double c = bin_center(i);
    if (c >= lo && c < hi) in += counts[i];
  }
  return static_cast<double>(in) / static_cast<double>(total);
}

CdfStep find_step(const FidelityHistogram& hist, std::uint64_t minus_count, const CondErrorProbs& per_round) {
  constexpr double kSearch = 0.02;
  constexpr double kWindow = 0.005;
  CdfStep step;
  step.minus_count = minus_count;
  step.target = success_prob(SyndromeHistory{0, minus_count}, per_round);
  std::uint64_t best = 0;
  for (std::size_t i = 0; i < FidelityHistogram::kBins; ++i) {
    const double c = hist.bin_center(i);
    if (std::abs(c - step.target) <= kSearch && hist.counts[i] > best) {
      best = hist.counts[i];
      step.location = c;
    }
  }
  step.window_mass = hist.mass(step.target - kWindow, step.target + kWindow);
  return step;
}

Fig2Result run_fig2(const ExperimentSpec& spec) {
  spec.validate();
  const auto seeds = replication_seeds(spec.base.seed, spec.replications);
  const auto per_round = CondErrorProbs::from_flip_prob(spec.base.noise.round_flip_prob());
  Fig2Result result;
  for (const auto policy : spec.policies) {
    SimConfig c = spec.base;
    c.scenario = Scenario::kStream;
    c.batch_size = 1;
    c.policy = policy;
    std::vector<FidelityHistogram> per_rep(seeds.size());
    Fig2Policy entry;
    entry.policy = policy;
    entry.runs = run_replications(c, seeds, spec.threads, [&](std::size_t r, const RunMetrics& m) {
      for (const auto& d : m.departures) per_rep[r].add(d.fidelity);
    });
    for (const auto& h : per_rep) entry.histogram.merge(h);
    entry.row = make_row(spec.name, c, entry.runs, seeds, c.score_drops_as_zero);
    for (std::uint64_t x = 0; x <= 3; ++x) entry.steps.push_back(find_step(entry.histogram, x, per_round));
    result.policies.push_back(std::move(entry));
  }
  return result;
}

const std::vector<std::string> kResultColumns = {"experiment", "batch_size", "lambda_e",   "lambda_r",
                                                 "load",       "buffer",     "policy",     "mean",
                                                 "ci95",       "drop_rate",  "replications", "departures",
                                                 "seed_digest"};
const std::vector<std::string> kGapColumns = {"experiment", "batch_size", "lambda_e", "load",
                                              "buffer",     "gap_mean",   "gap_ci95", "replications"};
const std::vector<std::string> kCdfColumns = {"policy", "fidelity", "cdf"};

namespace {

void write_header(std::ostream& os, const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
}

}  // namespace

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  write_header(os, kResultColumns);
  for (const auto& r : rows) {
    os << r.experiment << ',' << r.batch_size << ',' << fmt_double(r.lambda_e) << ',' << fmt_double(r.lambda_r)
       << ',' << fmt_double(r.load) << ',' << fmt_buffer(r.buffer) << ',' << r.policy << ','
       << fmt_double(r.mean) << ',' << fmt_double(r.ci95) << ',' << fmt_double(r.drop_rate) << ','
       << r.replications << ',' << r.departures << ',' << r.seed_digest << '\n';
  }
}

void write_gaps_csv(std::ostream& os, const std::vector<GapRow>& gaps) {
  write_header(os, kGapColumns);
  for (const auto& g : gaps) {
    os << g.experiment << ',' << g.batch_size << ',' << fmt_double(g.lambda_e) << ',' << fmt_double(g.load)
       << ',' << fmt_buffer(g.buffer) << ',' << fmt_double(g.gap.mean) << ',' << fmt_double(g.gap.ci95) << ','
       << g.gap.n << '\n';
  }
}

void write_cdf_csv(std::ostream& os, const Fig2Result& result) {
  write_header(os, kCdfColumns);
  for (const auto& p : result.policies) {
    for (int i = 0; i <= 500; ++i) {
      const double x = 0.5 + 0.001 * i;
      os << policy_name(p.policy) << ',' << fmt_double(x) << ',' << fmt_double(p.histogram.cdf(x)) << '\n';
    }
  }
}

nlohmann::json config_json(const SimConfig& c) {
  nlohmann::json j;
  j["scenario"] = scenario_name(c.scenario);
  j["lambda_r"] = c.lambda_r;
  j["lambda_e"] = c.lambda_e;
  j["batch_size"] = c.batch_size;
  j["buffer"] = fmt_buffer(c.buffer);
  j["gamma"] = c.noise.gamma;
  j["tau"] = c.noise.tau;
  j["policy"] = policy_name(c.policy);
  j["seed"] = c.seed;
  j["horizon_departures"] = c.horizon_departures;
  j["horizon_seconds"] = c.horizon_seconds;
  j["warmup"] = c.effective_warmup();
  j["batch_order"] = batch_order_name(c.batch_order);
  j["score_drops_as_zero"] = c.score_drops_as_zero;
  return j;
}

nlohmann::json manifest(const ExperimentSpec& spec, const std::vector<std::string>& columns) {
  nlohmann::json j;
  j["experiment"] = spec.name;
  j["version"] = TELESCHED_VERSION;
  j["columns"] = columns;
  j["base_config"] = config_json(spec.base);
  j["batch_sizes"] = spec.batch_sizes;
  j["loads"] = spec.loads;
  j["rates"] = spec.rates;
  std::vector<std::string> policies;
  for (auto p : spec.policies) policies.emplace_back(policy_name(p));
  j["policies"] = policies;
  auto systems = nlohmann::json::array();
  for (const auto& s : spec.systems) {
    systems.push_back({{"lambda_e", s.lambda_e}, {"batch_size", s.batch_size}, {"buffer", fmt_buffer(s.buffer)}});
  }
  j["systems"] = systems;
  j["replications"] = spec.replications;
  const auto seeds = replication_seeds(spec.base.seed, spec.replications);
  j["replication_seeds"] = seeds;
  j["seed_digest"] = seed_digest(seeds);
  return j;
}

void write_svg_plot(std::ostream& os, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<PlotSeries>& series) {
  constexpr double kW = 640, kH = 420, kL = 70, kR = 20, kT = 40, kB = 50;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series) {
    for (double x : s.x) x0 = std::min(x0, x), x1 = std::max(x1, x);
    for (double y : s.y) y0 = std::min(y0, y), y1 = std::max(y1, y);
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  auto px = [&](double x) { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); };
  auto py = [&](double y) { return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB); };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  os << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR << "\" y2=\"" << kH - kB
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\"" << kH - kB
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 16 " << kH / 2
     << ")\" text-anchor=\"middle\" font-size=\"12\">" << y_label << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << kH - kB + 16 << "\" text-anchor=\"middle\" font-size=\"10\">"
       << fmt_double(std::round(xv * 1000) / 1000) << "</text>\n";
    os << "<text x=\"" << kL - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"10\">"
       << fmt_double(std::round(yv * 1000) / 1000) << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto* color = kColors[s % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
       << (series[s].dashed ? " stroke-dasharray=\"5,4\"" : "") << " points=\"";
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      os << px(series[s].x[i]) << ',' << py(series[s].y[i]) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << kW - kR - 150 << "\" y=\"" << kT + 14 * (s + 1) << "\" font-size=\"11\" fill=\"" << color
       << "\">" << series[s].label << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace telesched
