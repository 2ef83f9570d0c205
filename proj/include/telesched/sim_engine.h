#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "telesched/event_queue.h"
#include "telesched/random_streams.h"
#include "telesched/scheduling.h"
#include "telesched/syndrome_analytics.h"

namespace telesched {

enum class Scenario { kSingleBatch, kStream, kBatchedStream };

Scenario parse_scenario(std::string_view name);
std::string_view scenario_name(Scenario scenario);

/// How ids map to tie order inside a simultaneous batch.
enum class BatchOrder {
  kById,    // creation order
  kRandom,  // seeded random permutation per batch
};

BatchOrder parse_batch_order(std::string_view name);
std::string_view batch_order_name(BatchOrder order);

struct SimConfig {
  Scenario scenario = Scenario::kStream;
  double lambda_r = 90.0;  // request (or batch epoch) rate, hertz
  double lambda_e = 100.0;  // EPR generation rate, hertz
  std::uint64_t batch_size = 1;
  std::size_t buffer = kUnboundedCapacity;
  NoiseParams noise{50.0, 0.003};
  PolicyKind policy = PolicyKind::kFqf;
  std::uint64_t seed = 1;
  // Total departures to simulate; 0 means no departure limit.
  std::uint64_t horizon_departures = 100'000;
  // Simulated-time limit in seconds; 0 means no time limit.
  double horizon_seconds = 0.0;
  // Leading departures excluded from statistics. Defaults to 10% of
  // horizon_departures for stream scenarios and 0 for single_batch.
  std::optional<std::uint64_t> warmup;
  BatchOrder batch_order = BatchOrder::kById;
  bool score_drops_as_zero = false;

  void validate() const;
  std::uint64_t effective_warmup() const;
};

/// Offered load lambda_r * b / lambda_e. Throws for single_batch.
double load(const SimConfig& config);

struct Departure {
  std::uint64_t id = 0;
  double arrival_time = 0.0;
  double time = 0.0;
  SyndromeHistory history;  // completed full-length rounds at selection time
  std::optional<SyndromeOutcome> final_round;
  double final_interval = 0.0;
  double fidelity = 1.0;
  bool no_error = true;  // realized logical parity is even

  /// History including the final partial round, if one was taken.
  SyndromeHistory final_history() const {
    SyndromeHistory h = history;
    if (final_round) record_outcome(h, *final_round);
    return h;
  }
};

struct RunMetrics {
  std::uint64_t seed = 0;
  std::uint64_t arrivals_count = 0;
  std::uint64_t departures_count = 0;  // includes warmup departures
  std::uint64_t pushout_count = 0;
  std::uint64_t residual_occupancy = 0;
  std::uint64_t warmup_departures = 0;
  std::uint64_t arrivals_after_warmup = 0;
  std::uint64_t pushouts_after_warmup = 0;
  double end_time = 0.0;
  double mean_occupancy = 0.0;
  std::uint64_t max_occupancy = 0;
  std::vector<Departure> departures;  // post-warmup only

  std::vector<double> fidelity_samples() const;
  std::vector<double> departure_times() const;
  double mean_fidelity(bool score_drops_as_zero = false) const;
  double mean_realized_no_error() const;
  double drop_rate() const;
};

/// Per-epoch Poisson arrivals.
class ArrivalProcess {
 public:
  ArrivalProcess(double rate, std::uint64_t root_seed)
      : rate_(rate), rng_(make_engine(root_seed, StreamTag::kArrivals)) {}
  double next_epoch(double now) { return now + exponential(rate_, rng_); }

 private:
  double rate_;
  std::mt19937_64 rng_;
};

/// On-demand EPR generation: one exponential draw per generation attempt.
class EprProcess {
 public:
  EprProcess(double rate, std::uint64_t root_seed)
      : rate_(rate), rng_(make_engine(root_seed, StreamTag::kEpr)) {}
  double completion_time(double start) { return start + exponential(rate_, rng_); }

 private:
  double rate_;
  std::mt19937_64 rng_;
};

/// The first `rounds` outcomes of qubit `qubit_id`'s syndrome stream at flip
/// probability `p`, as the simulator would draw them.
std::vector<SyndromeOutcome> syndrome_trajectory(std::uint64_t root_seed, std::uint64_t qubit_id,
                                                 std::uint64_t rounds, double p);

/// One deterministic discrete-event run.
class Simulator {
 public:
  explicit Simulator(SimConfig config);

  RunMetrics run();

 private:
  void handle_arrival(const Event& e);
  void handle_ec_round(const Event& e);
  void handle_epr_ready(const Event& e);

  void schedule_next_ec_round(const QubitRecord& q);
  void start_generation(double now);
  void serve(std::size_t index, double now);
  std::size_t find(std::uint64_t id) const;
  void remove_at(std::size_t index);
  void advance_clock(double now);
  bool finished() const;

  SimConfig config_;
  double round_flip_prob_;
  CondErrorProbs per_round_;
  std::uint64_t warmup_;

  EventQueue queue_;
  ArrivalProcess arrivals_;
  EprProcess epr_;
  std::mt19937_64 batch_order_rng_;

  std::vector<QubitRecord> buffer_;
  std::unordered_map<std::uint64_t, bool> realized_flip_;
  std::uint64_t next_id_ = 0;
  bool generating_ = false;
  std::uint64_t generation_token_ = 0;

  double clock_ = 0.0;
  double occupancy_integral_ = 0.0;
  RunMetrics metrics_;
};

RunMetrics run(const SimConfig& config);

}  // namespace telesched
