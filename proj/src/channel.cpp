#include "henosim/channel.hpp"

#include <algorithm>
#include <string>

#include "henosim/errors.hpp"

namespace henosim::sim {

namespace {

// Longer than any frame airtime at the supported data rates.
constexpr double kHistorySpan = 0.05;

}  // namespace

std::uint32_t Channel::begin(protocol::NodeId source, const protocol::EncodedFrame& frame,
                             double start, double end, std::uint32_t& id_out) {
  Transmission tx{next_id_++, source, frame, start, end, false};
  std::uint32_t lost = 0;
  for (auto& other : ongoing_) {
    if (other.end > start) {
      if (!other.collided) {
        other.collided = true;
        ++lost;
      }
      if (!tx.collided) {
        tx.collided = true;
        ++lost;
      }
    }
  }
  id_out = tx.id;
  ongoing_.push_back(tx);
  return lost;
}

Transmission Channel::finish(std::uint32_t id) {
  const auto it = std::find_if(ongoing_.begin(), ongoing_.end(),
                               [id](const Transmission& t) { return t.id == id; });
  if (it == ongoing_.end()) {
    throw InvariantViolation("finishing unknown transmission " + std::to_string(id));
  }
  Transmission tx = *it;
  ongoing_.erase(it);

  history_.push_back({tx.id, tx.start, tx.end});
  while (!history_.empty() && history_.front().end < tx.end - kHistorySpan) {
    history_.pop_front();
  }
  return tx;
}

bool Channel::busy(double now) const {
  return std::any_of(ongoing_.begin(), ongoing_.end(),
                     [now](const Transmission& t) { return t.start < now && t.end > now; });
}

void Channel::check_clean(const Transmission& tx) const {
  const auto overlaps = [&tx](std::uint32_t id, double start, double end) {
    return id != tx.id && start < tx.end && end > tx.start;
  };
  for (const auto& other : ongoing_) {
    if (overlaps(other.id, other.start, other.end)) {
      throw InvariantViolation("frame delivered while overlapping transmission " +
                               std::to_string(other.id));
    }
  }
  for (const auto& other : history_) {
    if (overlaps(other.id, other.start, other.end)) {
      throw InvariantViolation("frame delivered while overlapping transmission " +
                               std::to_string(other.id));
    }
  }
}

}  // namespace henosim::sim
