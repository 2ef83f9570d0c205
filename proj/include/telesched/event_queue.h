#pragma once

#include <cstdint>
#include <queue>
#include <tuple>
#include <vector>

namespace telesched {

/// Rank order at equal timestamps: syndrome rounds complete before any
/// admission or service decision sees the buffer.
enum class EventClass : std::uint8_t { kEcRound = 0, kArrival = 1, kEprReady = 2 };

struct Event {
  double time = 0.0;
  EventClass cls = EventClass::kEcRound;
  std::uint64_t seq = 0;
  // Qubit id (kEcRound), batch size (kArrival) or generation token (kEprReady).
  std::uint64_t payload = 0;

  friend bool operator<(const Event& a, const Event& b) {
    return std::tie(a.time, a.cls, a.seq) < std::tie(b.time, b.cls, b.seq);
  }
  friend bool operator>(const Event& a, const Event& b) { return b < a; }
};

/// Min-queue on (time, class, seq). Sequence numbers are assigned on push.
class EventQueue {
 public:
  Event push(double time, EventClass cls, std::uint64_t payload) {
    const Event e{time, cls, next_seq_++, payload};
    heap_.push(e);
    return e;
  }

  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  std::priority_queue<Event, std::vector<Event>, std::greater<>> heap_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace telesched
