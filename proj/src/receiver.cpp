#include <algorithm>

#include "henosim/errors.hpp"
#include "henosim/mac.hpp"

namespace henosim::protocol {

const char* to_string(ReceiverPhase phase) {
  switch (phase) {
    case ReceiverPhase::sleeping:
      return "sleeping";
    case ReceiverPhase::listening:
      return "listening";
    case ReceiverPhase::awaiting_txb:
      return "awaiting_txb";
    case ReceiverPhase::awaiting_data:
      return "awaiting_data";
    case ReceiverPhase::sending:
      return "sending";
  }
  return "?";
}

std::optional<CollectedTxb> select_txb(std::span<const CollectedTxb> collected) {
  if (collected.empty()) {
    return std::nullopt;
  }
  const auto best = std::min_element(
      collected.begin(), collected.end(), [](const CollectedTxb& a, const CollectedTxb& b) {
        if (a.priority != b.priority) {
          return level_of(a.priority) > level_of(b.priority);
        }
        return a.arrival < b.arrival;
      });
  return *best;
}

Receiver::Receiver(NodeId id, MacTiming timing, double energy_ok_threshold_pct)
    : id_(id), timing_(timing), energy_ok_threshold_(energy_ok_threshold_pct) {}

void Receiver::begin_window(double now, double t_listen) {
  window_end_ = now + t_listen;
  phase_ = ReceiverPhase::listening;
}

WakeupBeacon Receiver::start_round(double now, double re_total_pct) {
  (void)now;
  if (phase_ != ReceiverPhase::listening) {
    throw InvariantViolation(std::string("WB round started while ") + to_string(phase_));
  }
  collected_.clear();
  selected_.reset();
  best_level_ = 0;
  phase_ = ReceiverPhase::sending;
  return WakeupBeacon{id_, re_total_pct >= energy_ok_threshold_};
}

double Receiver::on_wb_sent(double now) {
  phase_ = ReceiverPhase::awaiting_txb;
  tw_deadline_ = now + timing_.t_w;
  return tw_deadline_;
}

TxbOutcome Receiver::on_txb(const TxBeacon& txb, double now) {
  TxbOutcome out;
  out.deadline = tw_deadline_;
  if (phase_ != ReceiverPhase::awaiting_txb || txb.da != id_ || now >= tw_deadline_) {
    return out;
  }
  collected_.push_back({txb.sa, txb.priority, now});
  out.kind = TxbOutcome::Kind::recorded;

  const int level = level_of(txb.priority);
  if (level <= best_level_) {
    return out;
  }
  best_level_ = level;
  if (txb.priority == Priority::P4) {
    // Nothing can outrank P4: stop waiting and grant it.
    selected_ = txb.sa;
    phase_ = ReceiverPhase::sending;
    out.kind = TxbOutcome::Kind::select_now;
    out.rxb = RxBeacon{id_, txb.sa};
    return out;
  }
  const double remaining = tw_deadline_ - now;
  tw_deadline_ = now + remaining * static_cast<double>(4 - level) / 4.0;
  out.deadline_changed = true;
  out.deadline = tw_deadline_;
  return out;
}

std::optional<RxBeacon> Receiver::on_tw_expiry(double now) {
  (void)now;
  if (phase_ != ReceiverPhase::awaiting_txb) {
    return std::nullopt;
  }
  const auto winner = select_txb(collected_);
  if (!winner) {
    phase_ = ReceiverPhase::listening;
    return std::nullopt;
  }
  selected_ = winner->sender;
  phase_ = ReceiverPhase::sending;
  return RxBeacon{id_, winner->sender};
}

double Receiver::on_rxb_sent(double now) {
  if (!selected_) {
    throw InvariantViolation("RxB sent without a selected sender");
  }
  phase_ = ReceiverPhase::awaiting_data;
  data_deadline_ = now + timing_.reply_timeout(FrameKind::data);
  return data_deadline_;
}

std::optional<Ack> Receiver::on_data(const DataFrame& data, double now) {
  (void)now;
  if (phase_ != ReceiverPhase::awaiting_data || data.da != id_ || !selected_ ||
      data.sa != *selected_) {
    return std::nullopt;
  }
  phase_ = ReceiverPhase::sending;
  return Ack{id_, data.sa, data.seq};
}

void Receiver::on_ack_sent(double now) {
  (void)now;
  phase_ = ReceiverPhase::listening;
}

void Receiver::on_data_timeout(double now) {
  (void)now;
  if (phase_ == ReceiverPhase::awaiting_data) {
    phase_ = ReceiverPhase::listening;
  }
}

void Receiver::sleep() { phase_ = ReceiverPhase::sleeping; }

}  // namespace henosim::protocol
