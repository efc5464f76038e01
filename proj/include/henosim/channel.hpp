#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "henosim/frame.hpp"

namespace henosim::sim {

struct Transmission {
  std::uint32_t id = 0;
  protocol::NodeId source = 0;
  protocol::EncodedFrame frame;
  double start = 0.0;
  double end = 0.0;
  bool collided = false;
};

/// Single shared medium for a star where every node hears every other node.
/// No propagation delay, no capture: any two transmissions that overlap in
/// time destroy each other.
class Channel {
 public:
  /// Starts a transmission; marks it and every overlapping one as collided.
  /// Returns the number of frames newly lost to this overlap.
  std::uint32_t begin(protocol::NodeId source, const protocol::EncodedFrame& frame, double start,
                      double end, std::uint32_t& id_out);

  /// Removes a finished transmission from the medium and returns it.
  Transmission finish(std::uint32_t id);

  /// Carrier sense: true when a transmission that started strictly before
  /// `now` is still on the air.
  [[nodiscard]] bool busy(double now) const;
  [[nodiscard]] bool idle() const { return ongoing_.empty(); }

  /// Throws InvariantViolation if any other transmission, ongoing or
  /// recently finished, overlapped `tx`.
  void check_clean(const Transmission& tx) const;

 private:
  struct Interval {
    std::uint32_t id;
    double start;
    double end;
  };

  std::vector<Transmission> ongoing_;
  std::deque<Interval> history_;
  std::uint32_t next_id_ = 1;
};

}  // namespace henosim::sim
