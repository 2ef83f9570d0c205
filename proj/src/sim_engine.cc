#include "telesched/sim_engine.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace telesched {

Scenario parse_scenario(std::string_view name) {
  if (name == "single_batch") return Scenario::kSingleBatch;
  if (name == "stream") return Scenario::kStream;
  if (name == "batched_stream") return Scenario::kBatchedStream;
  throw std::invalid_argument("unknown scenario '" + std::string(name) +
                              "' (expected single_batch, stream or batched_stream)");
}

std::string_view scenario_name(Scenario scenario) {
  switch (scenario) {
    case Scenario::kSingleBatch:
      return "single_batch";
    case Scenario::kStream:
      return "stream";
    case Scenario::kBatchedStream:
      return "batched_stream";
  }
  return "unknown";
}

BatchOrder parse_batch_order(std::string_view name) {
  if (name == "id") return BatchOrder::kById;
  if (name == "random") return BatchOrder::kRandom;
  throw std::invalid_argument("unknown batch order '" + std::string(name) + "' (expected id or random)");
}

std::string_view batch_order_name(BatchOrder order) {
  return order == BatchOrder::kById ? "id" : "random";
}

void SimConfig::validate() const {
  noise.validate();
  if (!(lambda_e > 0.0) || !std::isfinite(lambda_e)) {
    throw std::invalid_argument("lambda_e must be positive");
  }
  if (batch_size < 1) {
    throw std::invalid_argument("batch size must be at least 1");
  }
  if (buffer < batch_size) {
    throw std::invalid_argument("buffer (" + std::to_string(buffer) + ") must hold at least one batch (" +
                                std::to_string(batch_size) + ")");
  }
  if (!(horizon_seconds >= 0.0)) {
    throw std::invalid_argument("horizon_seconds must be non-negative");
  }
  if (scenario == Scenario::kSingleBatch) {
    return;
  }
  if (scenario == Scenario::kStream && batch_size != 1) {
    throw std::invalid_argument("stream scenario takes single arrivals; use batched_stream for b > 1");
  }
  if (!(lambda_r > 0.0) || !std::isfinite(lambda_r)) {
    throw std::invalid_argument("lambda_r must be positive");
  }
  if (horizon_departures == 0 && horizon_seconds == 0.0) {
    throw std::invalid_argument("stream scenarios need a departure or time horizon");
  }
  if (warmup && horizon_departures != 0 && *warmup >= horizon_departures) {
    throw std::invalid_argument("warmup must be smaller than the departure horizon");
  }
}

std::uint64_t SimConfig::effective_warmup() const {
  if (scenario == Scenario::kSingleBatch) {
    return 0;
  }
  if (warmup) {
    return *warmup;
  }
  return horizon_departures / 10;
}

double load(const SimConfig& config) {
  if (config.scenario == Scenario::kSingleBatch) {
    throw std::invalid_argument("load is undefined for the single_batch scenario");
  }
  return config.lambda_r * static_cast<double>(config.batch_size) / config.lambda_e;
}

std::vector<double> RunMetrics::fidelity_samples() const {
  std::vector<double> out;
  out.reserve(departures.size());
  for (const auto& d : departures) out.push_back(d.fidelity);
  return out;
}

std::vector<double> RunMetrics::departure_times() const {
  std::vector<double> out;
  out.reserve(departures.size());
  for (const auto& d : departures) out.push_back(d.time);
  return out;
}

double RunMetrics::mean_fidelity(bool score_drops_as_zero) const {
  double sum = 0.0;
  for (const auto& d : departures) sum += d.fidelity;
  const auto n = departures.size() + (score_drops_as_zero ? pushouts_after_warmup : 0);
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double RunMetrics::mean_realized_no_error() const {
  if (departures.empty()) return 0.0;
  const auto ok = std::count_if(departures.begin(), departures.end(), [](const Departure& d) { return d.no_error; });
  return static_cast<double>(ok) / static_cast<double>(departures.size());
}

double RunMetrics::drop_rate() const {
  const auto total = departures.size() + pushouts_after_warmup;
  return total == 0 ? 0.0 : static_cast<double>(pushouts_after_warmup) / static_cast<double>(total);
}

std::vector<SyndromeOutcome> syndrome_trajectory(std::uint64_t root_seed, std::uint64_t qubit_id,
                                                 std::uint64_t rounds, double p) {
  const QubitSyndromeStream stream(root_seed, qubit_id);
  std::vector<SyndromeOutcome> out;
  out.reserve(rounds);
  for (std::uint64_t k = 0; k < rounds; ++k) out.push_back(stream.sample(k, p).outcome);
  return out;
}

Simulator::Simulator(SimConfig config)
    : config_((config.validate(), config)),
      round_flip_prob_(config_.noise.round_flip_prob()),
      per_round_(CondErrorProbs::from_flip_prob(round_flip_prob_)),
      warmup_(config_.effective_warmup()),
      arrivals_(config_.scenario == Scenario::kSingleBatch ? 1.0 : config_.lambda_r, config_.seed),
      epr_(config_.lambda_e, config_.seed),
      batch_order_rng_(make_engine(config_.seed, StreamTag::kBatchOrder)) {
  metrics_.seed = config_.seed;
  metrics_.warmup_departures = warmup_;
}

RunMetrics Simulator::run() {
  if (config_.scenario == Scenario::kSingleBatch) {
    queue_.push(0.0, EventClass::kArrival, config_.batch_size);
  } else {
    queue_.push(arrivals_.next_epoch(0.0), EventClass::kArrival, config_.batch_size);
  }

  while (!queue_.empty()) {
    const Event e = queue_.pop();
    if (config_.horizon_seconds > 0.0 && e.time > config_.horizon_seconds) {
      advance_clock(config_.horizon_seconds);
      break;
    }
    advance_clock(e.time);
    switch (e.cls) {
      case EventClass::kEcRound:
        handle_ec_round(e);
        break;
      case EventClass::kArrival:
        handle_arrival(e);
        break;
      case EventClass::kEprReady:
        handle_epr_ready(e);
        break;
    }
    if (finished()) break;
  }

  metrics_.end_time = clock_;
  metrics_.residual_occupancy = buffer_.size();
  metrics_.mean_occupancy = clock_ > 0.0 ? occupancy_integral_ / clock_ : 0.0;
  return std::move(metrics_);
}

bool Simulator::finished() const {
  if (config_.scenario == Scenario::kSingleBatch) {
    return metrics_.arrivals_count > 0 && buffer_.empty();
  }
  return config_.horizon_departures != 0 && metrics_.departures_count >= config_.horizon_departures;
}

void Simulator::advance_clock(double now) {
  occupancy_integral_ += static_cast<double>(buffer_.size()) * (now - clock_);
  clock_ = now;
}

void Simulator::handle_arrival(const Event& e) {
  const double now = e.time;
  const auto b = e.payload;
  std::vector<QubitRecord> batch;
  batch.reserve(b);
  for (std::uint64_t i = 0; i < b; ++i) batch.push_back(QubitRecord::fresh(next_id_ + i, now));
  if (config_.batch_order == BatchOrder::kRandom && b > 1) {
    std::vector<std::uint64_t> order(b);
    std::iota(order.begin(), order.end(), next_id_);
    std::shuffle(order.begin(), order.end(), batch_order_rng_);
    for (std::uint64_t i = 0; i < b; ++i) batch[i].tiebreak = order[i];
  }
  next_id_ += b;

  const bool counting = metrics_.departures_count >= warmup_;
  metrics_.arrivals_count += b;
  if (counting) metrics_.arrivals_after_warmup += b;

  const auto evicted = admit(buffer_, batch, config_.buffer, config_.policy, per_round_);
  for (const auto id : evicted) realized_flip_.erase(id);
  metrics_.pushout_count += evicted.size();
  if (counting) metrics_.pushouts_after_warmup += evicted.size();

  for (const auto& q : batch) {
    if (std::find(evicted.begin(), evicted.end(), q.id) != evicted.end()) continue;
    realized_flip_.emplace(q.id, false);
    schedule_next_ec_round(q);
  }
  metrics_.max_occupancy = std::max<std::uint64_t>(metrics_.max_occupancy, buffer_.size());

  if (config_.scenario != Scenario::kSingleBatch) {
    queue_.push(arrivals_.next_epoch(now), EventClass::kArrival, config_.batch_size);
  }
  if (!generating_ && !buffer_.empty()) {
    start_generation(now);
  }
}

void Simulator::schedule_next_ec_round(const QubitRecord& q) {
  const double next = q.arrival_time + static_cast<double>(q.history.rounds() + 1) * config_.noise.tau;
  queue_.push(next, EventClass::kEcRound, q.id);
}

void Simulator::handle_ec_round(const Event& e) {
  const std::size_t index = find(e.payload);
  if (index == buffer_.size()) {
    return;  // served or pushed out
  }
  QubitRecord& q = buffer_[index];
  const QubitSyndromeStream stream(config_.seed, q.id);
  const RoundSample s = stream.sample(q.history.rounds(), round_flip_prob_);
  record_outcome(q.history, s.outcome);
  q.last_ec_time = e.time;
  if (s.logical_flip) {
    auto& flip = realized_flip_.at(q.id);
    flip = !flip;
  }
  schedule_next_ec_round(q);
}

void Simulator::start_generation(double now) {
  generating_ = true;
  ++generation_token_;
  queue_.push(epr_.completion_time(now), EventClass::kEprReady, generation_token_);
}

void Simulator::handle_epr_ready(const Event& e) {
  if (!generating_ || e.payload != generation_token_) {
    return;  // cancelled when the buffer emptied
  }
  generating_ = false;
  if (buffer_.empty()) {
    return;
  }
  serve(service_index(config_.policy, buffer_, per_round_), e.time);
  if (!buffer_.empty()) {
    start_generation(e.time);
  }
}

void Simulator::serve(std::size_t index, double now) {
  const QubitRecord& q = buffer_[index];
  Departure d;
  d.id = q.id;
  d.arrival_time = q.arrival_time;
  d.time = now;
  d.history = q.history;
  bool flip = realized_flip_.at(q.id);
  double bias = parity_bias(q.history, per_round_);

  const double delta = now - q.last_ec_time;
  if (delta > 0.0) {
    const double p_final = phase_flip_prob(config_.noise.gamma, delta);
    const QubitSyndromeStream stream(config_.seed, q.id);
    const RoundSample s = stream.sample(q.history.rounds(), p_final);
    d.final_round = s.outcome;
    d.final_interval = delta;
    bias *= CondErrorProbs::from_flip_prob(p_final).factor(s.outcome);
    flip = flip != s.logical_flip;
  }
  d.fidelity = (1.0 + bias) / 2.0;
  d.no_error = !flip;

  if (metrics_.departures_count >= warmup_) {
    metrics_.departures.push_back(d);
  }
  ++metrics_.departures_count;
  realized_flip_.erase(q.id);
  remove_at(index);
}

std::size_t Simulator::find(std::uint64_t id) const {
  for (std::size_t i = 0; i < buffer_.size(); ++i) {
    if (buffer_[i].id == id) return i;
  }
  return buffer_.size();
}

void Simulator::remove_at(std::size_t index) {
  // Policies are order-independent, so swap-remove is safe.
  buffer_[index] = buffer_.back();
  buffer_.pop_back();
}

RunMetrics run(const SimConfig& config) { return Simulator(config).run(); }

}  // namespace telesched
