#include "telesched/scheduling.h"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace telesched {

namespace {

void require_non_empty(std::span<const QubitRecord> buffer, const char* what) {
  if (buffer.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty buffer");
  }
}

// Returns the index whose key is best under `better`; equal keys fall back to
// the lowest tiebreak.
template <class Key, class Better>
std::size_t best_index(std::span<const QubitRecord> buffer, Key key, Better better) {
  std::size_t best = 0;
  auto best_key = key(buffer[0]);
  for (std::size_t i = 1; i < buffer.size(); ++i) {
    const auto k = key(buffer[i]);
    if (better(k, best_key) || (k == best_key && buffer[i].tiebreak < buffer[best].tiebreak)) {
      best = i;
      best_key = k;
    }
  }
  return best;
}

std::size_t oldest_index(std::span<const QubitRecord> buffer) {
  return best_index(
      buffer, [](const QubitRecord& q) { return q.arrival_time; }, std::less<>{});
}

}  // namespace

PolicyKind parse_policy(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "oqf") return PolicyKind::kOqf;
  if (lower == "yqf") return PolicyKind::kYqf;
  if (lower == "fqf") return PolicyKind::kFqf;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "' (expected oqf, yqf or fqf)");
}

std::string_view policy_name(PolicyKind policy) {
  switch (policy) {
    case PolicyKind::kOqf:
      return "oqf";
    case PolicyKind::kYqf:
      return "yqf";
    case PolicyKind::kFqf:
      return "fqf";
  }
  return "unknown";
}

std::size_t service_index(PolicyKind policy, std::span<const QubitRecord> buffer,
                          const CondErrorProbs& per_round) {
  require_non_empty(buffer, "select_for_service");
  switch (policy) {
    case PolicyKind::kOqf:
      return oldest_index(buffer);
    case PolicyKind::kYqf:
      return best_index(
          buffer, [](const QubitRecord& q) { return q.arrival_time; }, std::greater<>{});
    case PolicyKind::kFqf:
      return best_index(
          buffer, [&](const QubitRecord& q) { return success_prob(q.history, per_round); },
          std::greater<>{});
  }
  throw std::logic_error("unhandled policy");
}

std::size_t pushout_index(PolicyKind policy, std::span<const QubitRecord> buffer,
                          const CondErrorProbs& per_round) {
  require_non_empty(buffer, "select_for_pushout");
  switch (policy) {
    case PolicyKind::kOqf:
    case PolicyKind::kYqf:
      return oldest_index(buffer);
    case PolicyKind::kFqf:
      return best_index(
          buffer, [&](const QubitRecord& q) { return success_prob(q.history, per_round); }, std::less<>{});
  }
  throw std::logic_error("unhandled policy");
}

std::uint64_t select_for_service(PolicyKind policy, std::span<const QubitRecord> buffer,
                                 const CondErrorProbs& per_round) {
  return buffer[service_index(policy, buffer, per_round)].id;
}

std::uint64_t select_for_pushout(PolicyKind policy, std::span<const QubitRecord> buffer,
                                 const CondErrorProbs& per_round) {
  return buffer[pushout_index(policy, buffer, per_round)].id;
}

std::vector<std::uint64_t> admit(std::vector<QubitRecord>& buffer, std::span<const QubitRecord> arrivals,
                                 std::size_t capacity, PolicyKind policy, const CondErrorProbs& per_round) {
  if (capacity == 0) {
    throw std::invalid_argument("admit: capacity must be at least 1");
  }
  buffer.insert(buffer.end(), arrivals.begin(), arrivals.end());
  std::vector<std::uint64_t> evicted;
  while (buffer.size() > capacity) {
    const std::size_t victim = pushout_index(policy, buffer, per_round);
    evicted.push_back(buffer[victim].id);
    buffer.erase(buffer.begin() + static_cast<std::ptrdiff_t>(victim));
  }
  return evicted;
}

}  // namespace telesched
