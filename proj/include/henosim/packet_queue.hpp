#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>

#include "henosim/frame.hpp"

namespace henosim::protocol {

struct Packet {
  std::uint32_t id = 0;
  NodeId origin = 0;
  Priority priority = Priority::P1;
  double generated_at = 0.0;

  friend bool operator==(const Packet&, const Packet&) = default;
};

/// Bounded sender buffer. Serves the highest priority first, FIFO within a
/// priority. On overflow the oldest packet of the lowest priority present
/// is evicted.
class PacketQueue {
 public:
  explicit PacketQueue(std::size_t capacity);

  /// Returns the evicted packet when the queue was full. That may be `packet`
  /// itself if it is the only one of the lowest priority.
  std::optional<Packet> push(const Packet& packet);

  /// Puts a packet back at the head of its priority lane (retry after a
  /// failed attempt). Same eviction rule as push.
  std::optional<Packet> push_front(const Packet& packet);

  [[nodiscard]] const Packet* front() const;
  Packet pop_front();

  [[nodiscard]] bool empty() const { return size_ == 0; }
  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }

 private:
  std::optional<Packet> evict_if_over();

  std::array<std::deque<Packet>, kPriorityCount> lanes_;
  std::size_t capacity_;
  std::size_t size_ = 0;
};

}  // namespace henosim::protocol
