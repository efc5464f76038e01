#include "henosim/packet_queue.hpp"

#include "henosim/errors.hpp"

namespace henosim::protocol {

PacketQueue::PacketQueue(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw ConfigError("queue_capacity", "must be > 0");
  }
}

std::optional<Packet> PacketQueue::push(const Packet& packet) {
  lanes_[index_of(packet.priority)].push_back(packet);
  ++size_;
  return evict_if_over();
}

std::optional<Packet> PacketQueue::push_front(const Packet& packet) {
  lanes_[index_of(packet.priority)].push_front(packet);
  ++size_;
  return evict_if_over();
}

const Packet* PacketQueue::front() const {
  for (auto lane = lanes_.rbegin(); lane != lanes_.rend(); ++lane) {
    if (!lane->empty()) {
      return &lane->front();
    }
  }
  return nullptr;
}

Packet PacketQueue::pop_front() {
  for (auto lane = lanes_.rbegin(); lane != lanes_.rend(); ++lane) {
    if (!lane->empty()) {
      Packet p = lane->front();
      lane->pop_front();
      --size_;
      return p;
    }
  }
  throw InvariantViolation("pop_front on empty packet queue");
}

std::optional<Packet> PacketQueue::evict_if_over() {
  if (size_ <= capacity_) {
    return std::nullopt;
  }
  for (auto& lane : lanes_) {
    if (!lane.empty()) {
      Packet victim = lane.front();
      lane.pop_front();
      --size_;
      return victim;
    }
  }
  return std::nullopt;
}

}  // namespace henosim::protocol
