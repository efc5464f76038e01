#include "henosim/errors.hpp"
#include "henosim/mac.hpp"

namespace henosim::protocol {

const char* to_string(SenderPhase phase) {
  switch (phase) {
    case SenderPhase::sleeping:
      return "sleeping";
    case SenderPhase::awaiting_wb:
      return "awaiting_wb";
    case SenderPhase::contending:
      return "contending";
    case SenderPhase::transmitting_txb:
      return "transmitting_txb";
    case SenderPhase::awaiting_rxb:
      return "awaiting_rxb";
    case SenderPhase::transmitting_data:
      return "transmitting_data";
    case SenderPhase::awaiting_ack:
      return "awaiting_ack";
  }
  return "?";
}

Sender::Sender(NodeId id, std::size_t queue_capacity, MacTiming timing)
    : id_(id), timing_(timing), queue_(queue_capacity) {}

std::optional<Packet> Sender::enqueue(const Packet& packet) {
  auto evicted = queue_.push(packet);
  if (phase_ == SenderPhase::sleeping) {
    phase_ = SenderPhase::awaiting_wb;
  }
  return evicted;
}

bool Sender::on_wb(const WakeupBeacon& wb, double now) {
  if (phase_ == SenderPhase::transmitting_txb || phase_ == SenderPhase::transmitting_data ||
      phase_ == SenderPhase::awaiting_ack) {
    return false;
  }
  // A new round supersedes anything left over from the previous one.
  release_in_flight();
  receiver_ = wb.sa;
  wb_end_ = now;
  contention_deadline_ = now + timing_.t_w;
  if (!wb.energy_ok || queue_.empty()) {
    settle();
    return false;
  }
  phase_ = SenderPhase::contending;
  return true;
}

TxBeacon Sender::start_txb(double now) {
  if (!contention_open(now)) {
    throw InvariantViolation("TxB outside the contention window");
  }
  in_flight_ = queue_.pop_front();
  phase_ = SenderPhase::transmitting_txb;
  return TxBeacon{id_, receiver_, in_flight_->priority};
}

double Sender::on_txb_sent(double now) {
  (void)now;
  phase_ = SenderPhase::awaiting_rxb;
  return wb_end_ + timing_.t_w + timing_.reply_timeout(FrameKind::rxb);
}

std::optional<DataFrame> Sender::on_rxb(const RxBeacon& rxb, double now) {
  (void)now;
  if (phase_ == SenderPhase::awaiting_rxb && rxb.ss == id_ && in_flight_) {
    phase_ = SenderPhase::transmitting_data;
    outstanding_seq_ = next_seq_++;
    return DataFrame{id_, rxb.sa, in_flight_->priority, outstanding_seq_, in_flight_->id};
  }
  if (phase_ == SenderPhase::awaiting_rxb || phase_ == SenderPhase::contending) {
    // Another sender won this round.
    release_in_flight();
    settle();
  }
  return std::nullopt;
}

double Sender::on_data_sent(double now) {
  phase_ = SenderPhase::awaiting_ack;
  return now + timing_.reply_timeout(FrameKind::ack);
}

std::optional<Packet> Sender::on_ack(const Ack& ack, double now) {
  (void)now;
  if (phase_ != SenderPhase::awaiting_ack || ack.da != id_ || ack.seq != outstanding_seq_ ||
      !in_flight_) {
    return std::nullopt;
  }
  auto delivered = in_flight_;
  in_flight_.reset();
  settle();
  return delivered;
}

void Sender::on_rxb_timeout(double now) {
  (void)now;
  if (phase_ == SenderPhase::awaiting_rxb) {
    release_in_flight();
    settle();
  }
}

void Sender::on_ack_timeout(double now) {
  (void)now;
  if (phase_ == SenderPhase::awaiting_ack) {
    release_in_flight();
    settle();
  }
}

void Sender::give_up() {
  if (phase_ == SenderPhase::contending) {
    settle();
  }
}

std::vector<Packet> Sender::take_evicted() {
  std::vector<Packet> out;
  out.swap(evicted_);
  return out;
}

void Sender::release_in_flight() {
  if (!in_flight_) {
    return;
  }
  if (auto evicted = queue_.push_front(*in_flight_)) {
    evicted_.push_back(*evicted);
  }
  in_flight_.reset();
}

void Sender::settle() {
  phase_ = queue_.empty() && !in_flight_ ? SenderPhase::sleeping : SenderPhase::awaiting_wb;
}

}  // namespace henosim::protocol
