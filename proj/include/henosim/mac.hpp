#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "henosim/frame.hpp"
#include "henosim/packet_queue.hpp"

namespace henosim::protocol {

/// MAC timing constants shared by the receiver and sender state machines.
struct MacTiming {
  double t_w = 5e-3;          // s, TxB collection window
  double csma_slot = 0.32e-3; // s
  double data_rate = 250000;  // bit/s

  [[nodiscard]] double airtime(FrameKind kind) const { return frame_airtime(kind, data_rate); }
  /// 2 x frame airtime + one slot.
  [[nodiscard]] double reply_timeout(FrameKind awaited) const {
    return 2.0 * airtime(awaited) + csma_slot;
  }
};

// ---------------------------------------------------------------- receiver

enum class ReceiverPhase : std::uint8_t { sleeping, listening, awaiting_txb, awaiting_data, sending };

const char* to_string(ReceiverPhase phase);

struct CollectedTxb {
  NodeId sender = 0;
  Priority priority = Priority::P1;
  double arrival = 0.0;
};

/// Highest priority wins; equal priorities go to the earliest arrival.
std::optional<CollectedTxb> select_txb(std::span<const CollectedTxb> collected);

struct TxbOutcome {
  enum class Kind : std::uint8_t { ignored, recorded, select_now };
  Kind kind = Kind::ignored;
  bool deadline_changed = false;
  double deadline = 0.0;
  std::optional<RxBeacon> rxb;
};

/// Receiver side of the WB / TxB / RxB / DATA / ACK handshake. Time is
/// passed in; the caller owns the clock, the channel and the timers.
///
/// A listen window holds back-to-back rounds. Each round sends a WB, then
/// collects TxBs until T_w runs out. A TxB that raises the highest priority
/// seen so far shrinks the remaining wait to remaining * (4 - k) / 4 for
/// priority P_k, so a P4 request ends the wait at once.
class Receiver {
 public:
  Receiver(NodeId id, MacTiming timing, double energy_ok_threshold_pct);

  void begin_window(double now, double t_listen);
  [[nodiscard]] bool window_open(double now) const { return now < window_end_; }
  [[nodiscard]] double window_end() const { return window_end_; }

  /// listening -> sending. E_s is set when re_total_pct >= the threshold.
  WakeupBeacon start_round(double now, double re_total_pct);
  /// sending WB -> awaiting_txb. Returns the T_w deadline.
  double on_wb_sent(double now);
  TxbOutcome on_txb(const TxBeacon& txb, double now);
  /// Returns the RxB to send, or nothing when the round collected no TxB.
  std::optional<RxBeacon> on_tw_expiry(double now);
  /// sending RxB -> awaiting_data. Returns the DATA deadline.
  double on_rxb_sent(double now);
  std::optional<Ack> on_data(const DataFrame& data, double now);
  void on_ack_sent(double now);
  void on_data_timeout(double now);
  void sleep();

  [[nodiscard]] NodeId id() const { return id_; }
  [[nodiscard]] ReceiverPhase phase() const { return phase_; }
  [[nodiscard]] double tw_deadline() const { return tw_deadline_; }
  [[nodiscard]] double data_deadline() const { return data_deadline_; }
  [[nodiscard]] const std::vector<CollectedTxb>& collected() const { return collected_; }
  [[nodiscard]] std::optional<NodeId> selected() const { return selected_; }
  [[nodiscard]] const MacTiming& timing() const { return timing_; }

 private:
  NodeId id_;
  MacTiming timing_;
  double energy_ok_threshold_;
  ReceiverPhase phase_ = ReceiverPhase::sleeping;
  double window_end_ = 0.0;
  double tw_deadline_ = 0.0;
  double data_deadline_ = 0.0;
  int best_level_ = 0;
  std::vector<CollectedTxb> collected_;
  std::optional<NodeId> selected_;
};

// ------------------------------------------------------------------ sender

enum class SenderPhase : std::uint8_t {
  sleeping,
  awaiting_wb,
  contending,
  transmitting_txb,
  awaiting_rxb,
  transmitting_data,
  awaiting_ack,
};

const char* to_string(SenderPhase phase);

/// Sender side of the handshake. Holds the priority queue and the packet
/// committed to the current round. A sender only transmits DATA after an
/// RxB names it, and only drops a packet from its buffer after the ACK.
class Sender {
 public:
  Sender(NodeId id, std::size_t queue_capacity, MacTiming timing);

  /// Returns the evicted packet if the buffer overflowed.
  std::optional<Packet> enqueue(const Packet& packet);

  /// True when the sender will contend in this round: E_s set and a packet
  /// waiting. A WB that arrives while DATA/ACK is in progress is ignored.
  bool on_wb(const WakeupBeacon& wb, double now);
  [[nodiscard]] bool contention_open(double now) const {
    return phase_ == SenderPhase::contending && now < contention_deadline_;
  }
  /// contending -> transmitting_txb. Commits the head packet to this round.
  TxBeacon start_txb(double now);
  /// transmitting_txb -> awaiting_rxb. Returns the RxB deadline.
  double on_txb_sent(double now);
  /// DATA to send when the RxB names this sender; otherwise sleeps until the next WB.
  std::optional<DataFrame> on_rxb(const RxBeacon& rxb, double now);
  /// transmitting_data -> awaiting_ack. Returns the ACK deadline.
  double on_data_sent(double now);
  /// The delivered packet when the ACK matches the outstanding DATA.
  std::optional<Packet> on_ack(const Ack& ack, double now);
  void on_rxb_timeout(double now);
  /// Puts the unacknowledged packet back at the head of its lane.
  void on_ack_timeout(double now);
  /// Leaves contention for this round.
  void give_up();

  [[nodiscard]] NodeId id() const { return id_; }
  [[nodiscard]] SenderPhase phase() const { return phase_; }
  [[nodiscard]] const PacketQueue& queue() const { return queue_; }
  [[nodiscard]] const std::optional<Packet>& in_flight() const { return in_flight_; }
  [[nodiscard]] bool has_work() const { return in_flight_.has_value() || !queue_.empty(); }
  [[nodiscard]] double contention_deadline() const { return contention_deadline_; }

  /// Packets evicted when an uncommitted packet went back into a full buffer.
  std::vector<Packet> take_evicted();
  [[nodiscard]] bool has_evicted() const { return !evicted_.empty(); }

 private:
  void release_in_flight();
  void settle();

  NodeId id_;
  MacTiming timing_;
  PacketQueue queue_;
  SenderPhase phase_ = SenderPhase::sleeping;
  std::optional<Packet> in_flight_;
  std::vector<Packet> evicted_;
  NodeId receiver_ = kReceiverId;
  double wb_end_ = 0.0;
  double contention_deadline_ = 0.0;
  std::uint16_t next_seq_ = 0;
  std::uint16_t outstanding_seq_ = 0;
};

}  // namespace henosim::protocol
