#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "telesched/syndrome_analytics.h"

namespace telesched {

/// Stateless 64-bit finalizer from SplitMix64.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// SplitMix64 generator. Small enough to construct per (qubit, round).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Named sub-streams spawned from one root seed.
enum class StreamTag : std::uint64_t {
  kArrivals = 1,
  kEpr = 2,
  kSyndrome = 3,
  kBatchOrder = 4,
  kReplication = 5,
  kOracleInstances = 6,
};

constexpr std::uint64_t derive_seed(std::uint64_t root, StreamTag tag, std::uint64_t index) {
  return mix64(mix64(root ^ mix64(static_cast<std::uint64_t>(tag))) + mix64(index));
}

/// Engine for an exogenous stream (arrivals, EPR generation, batch order).
inline std::mt19937_64 make_engine(std::uint64_t root, StreamTag tag, std::uint64_t index = 0) {
  return std::mt19937_64(derive_seed(root, tag, index));
}

/// Exponential variate by inversion; consumes one draw.
template <class Urbg>
double exponential(double rate, Urbg& rng) {
  return -std::log1p(-uniform01(rng)) / rate;
}

/// Per-qubit syndrome randomness keyed by (root seed, qubit id, round index).
/// Round k of qubit i draws the same bits no matter when it is evaluated or
/// which policy is running.
class QubitSyndromeStream {
 public:
  QubitSyndromeStream(std::uint64_t root, std::uint64_t qubit_id)
      : key_(derive_seed(root, StreamTag::kSyndrome, qubit_id)) {}

  SplitMix64 round(std::uint64_t round_index) const { return SplitMix64(mix64(key_ ^ mix64(round_index))); }

  RoundSample sample(std::uint64_t round_index, double p) const {
    SplitMix64 rng = round(round_index);
    return sample_round(p, rng);
  }

 private:
  std::uint64_t key_;
};

}  // namespace telesched
