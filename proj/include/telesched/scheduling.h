#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "telesched/syndrome_analytics.h"

namespace telesched {

/// One stored request qubit.
struct QubitRecord {
  std::uint64_t id = 0;
  double arrival_time = 0.0;
  SyndromeHistory history;
  double last_ec_time = 0.0;
  // Secondary ordering key for ties. Equals `id` unless the simulator
  // randomizes the order inside a simultaneous batch.
  std::uint64_t tiebreak = 0;

  static QubitRecord fresh(std::uint64_t id, double arrival_time) {
    return QubitRecord{id, arrival_time, {}, arrival_time, id};
  }
};

enum class PolicyKind { kOqf, kYqf, kFqf };

/// "oqf" | "yqf" | "fqf" (case-insensitive). Throws std::invalid_argument.
PolicyKind parse_policy(std::string_view name);
std::string_view policy_name(PolicyKind policy);

inline constexpr std::size_t kUnboundedCapacity = std::numeric_limits<std::size_t>::max();

/// Index into `buffer` of the qubit to teleport next. OQF: earliest arrival;
/// YQF: latest arrival; FQF: highest success probability. Ties go to the
/// lowest tiebreak key. Throws std::invalid_argument on an empty buffer.
std::size_t service_index(PolicyKind policy, std::span<const QubitRecord> buffer,
                          const CondErrorProbs& per_round);

/// Index of the lowest-priority qubit. OQF and YQF both drop the oldest
/// request; FQF drops the lowest success probability.
std::size_t pushout_index(PolicyKind policy, std::span<const QubitRecord> buffer,
                          const CondErrorProbs& per_round);

std::uint64_t select_for_service(PolicyKind policy, std::span<const QubitRecord> buffer,
                                 const CondErrorProbs& per_round);

std::uint64_t select_for_pushout(PolicyKind policy, std::span<const QubitRecord> buffer,
                                 const CondErrorProbs& per_round);

/// Appends every arrival, then evicts residents via select_for_pushout until
/// the buffer fits `capacity`. Returns evicted ids in eviction order.
std::vector<std::uint64_t> admit(std::vector<QubitRecord>& buffer, std::span<const QubitRecord> arrivals,
                                 std::size_t capacity, PolicyKind policy, const CondErrorProbs& per_round);

}  // namespace telesched
