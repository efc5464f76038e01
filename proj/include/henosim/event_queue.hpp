#pragma once

#include <cstdint>
#include <queue>
#include <vector>

namespace henosim::sim {

enum class EventKind : std::uint8_t {
  packet_gen,
  harvest_tick,
  energy_sample,
  receiver_wake,
  round_boundary,
  tx_end,
  tw_expiry,
  data_timeout,
  csma_attempt,
  rxb_timeout,
  ack_timeout,
};

const char* to_string(EventKind kind);

struct Event {
  double time = 0.0;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::packet_gen;
  std::uint16_t node = 0;
  std::uint32_t token = 0;
};

/// Min-heap on (time, sequence). Events at equal times run in the order they
/// were scheduled, which makes every run a deterministic total order.
class EventQueue {
 public:
  void schedule(double time, EventKind kind, std::uint16_t node = 0, std::uint32_t token = 0) {
    heap_.push(Event{time, next_sequence_++, kind, node, token});
  }

  [[nodiscard]] bool empty() const { return heap_.empty(); }
  [[nodiscard]] const Event& top() const { return heap_.top(); }

  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
  }

  [[nodiscard]] std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) {
        return a.time > b.time;
      }
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_sequence_ = 0;
};

}  // namespace henosim::sim
