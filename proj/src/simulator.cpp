#include "henosim/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <fmt/format.h>

#include "henosim/channel.hpp"
#include "henosim/energy.hpp"
#include "henosim/errors.hpp"
#include "henosim/event_queue.hpp"
#include "henosim/mac.hpp"
#include "henosim/policy.hpp"

namespace henosim::sim {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::packet_gen:
      return "packet_gen";
    case EventKind::harvest_tick:
      return "harvest_tick";
    case EventKind::energy_sample:
      return "energy_sample";
    case EventKind::receiver_wake:
      return "wake";
    case EventKind::round_boundary:
      return "round_boundary";
    case EventKind::tx_end:
      return "tx_end";
    case EventKind::tw_expiry:
      return "tw_expiry";
    case EventKind::data_timeout:
      return "data_timeout";
    case EventKind::csma_attempt:
      return "csma_attempt";
    case EventKind::rxb_timeout:
      return "rxb_timeout";
    case EventKind::ack_timeout:
      return "ack_timeout";
  }
  return "?";
}

namespace {

using energy::RadioState;
using protocol::FrameKind;
using protocol::NodeId;
using protocol::SenderPhase;

constexpr std::uint64_t kStreamTag = 0x68656e6fULL;

std::mt19937_64 node_stream(std::uint64_t seed, NodeId node) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(node), static_cast<std::uint32_t>(kStreamTag)};
  return std::mt19937_64(seq);
}

struct SenderNode {
  SenderNode(NodeId id, const SimConfig& cfg, const protocol::MacTiming& timing, double e_max,
             double initial, std::uint64_t seed)
      : mac(id, cfg.queue_capacity, timing),
        ledger(e_max, initial),
        meter(cfg.radio, RadioState::receive, 0.0),
        rng(node_stream(seed, id)) {}

  protocol::Sender mac;
  energy::EnergyLedger ledger;
  energy::RadioMeter meter;
  std::mt19937_64 rng;
  bool alive = true;
  double phase = 0.0;
  double next_gen = std::numeric_limits<double>::infinity();
  std::uint64_t generated = 0;
  std::uint32_t attempt_token = 0;
  std::uint32_t timer_token = 0;
  bool attempt_pending = false;
  double attempt_time = 0.0;
  bool waiting_idle = false;
};

class Simulator {
 public:
  Simulator(const SimConfig& config, std::span<const trace::SlotEnergy> slots, std::uint64_t seed,
            std::ostream* log)
      : cfg_(config),
        slots_(slots.begin(), slots.end()),
        seed_(seed),
        recorder_(metrics_, log),
        timing_{config.t_w, config.csma_slot, config.data_rate},
        receiver_(protocol::kReceiverId, timing_, config.e_s_threshold),
        receiver_ledger_(battery_capacity(config.battery),
                         battery_capacity(config.battery) * config.battery.initial_pct / 100.0),
        receiver_meter_(cfg_.radio, RadioState::receive, 0.0) {
    if (!cfg_.harvests_wind()) {
      for (auto& s : slots_) {
        s.wind_energy = 0.0;
      }
    }
    const double slot_span = static_cast<double>(slots_.size()) * cfg_.harvest.slot_duration;
    if (slot_span < cfg_.horizon) {
      throw ConfigError("trace", fmt::format("trace covers {} s, horizon is {} s", slot_span,
                                             cfg_.horizon));
    }
    const double sender_max = battery_capacity(cfg_.sender_battery);
    senders_.reserve(static_cast<std::size_t>(cfg_.senders));
    for (int i = 1; i <= cfg_.senders; ++i) {
      senders_.emplace_back(static_cast<NodeId>(i), cfg_, timing_, sender_max,
                            sender_max * cfg_.sender_battery.initial_pct / 100.0, seed_);
    }
    wb_air_ = timing_.airtime(FrameKind::wb);
    for (auto kind : {FrameKind::wb, FrameKind::txb, FrameKind::rxb, FrameKind::ack,
                      FrameKind::data}) {
      airtime_[static_cast<std::size_t>(kind)] = timing_.airtime(kind);
    }
  }

  Metrics run() {
    if (cfg_.horizon > 0.0) {
      start();
      for (;;) {
        const double heap_time =
            events_.empty() ? std::numeric_limits<double>::infinity() : events_.top().time;
        const std::size_t gen = next_generator();
        const double gen_time = senders_[gen].next_gen;
        if (gen_time <= heap_time) {
          if (!(gen_time < cfg_.horizon)) {
            break;
          }
          dispatch(Event{gen_time, 0, EventKind::packet_gen, senders_[gen].mac.id(), 0});
        } else {
          if (!(heap_time < cfg_.horizon)) {
            break;
          }
          dispatch(events_.pop());
        }
      }
    }
    finish();
    return std::move(metrics_);
  }

 private:
  double battery_capacity(const BatteryConfig& b) const {
    return energy::battery_capacity_joules(b.capacity_mah, cfg_.radio.voltage);
  }

  // ------------------------------------------------------------ setup

  void start() {
    recorder_.energy_sample(0.0, receiver_ledger_.remaining_total_percent());
    next_sample_ = cfg_.sample_interval;
    if (next_sample_ < cfg_.horizon) {
      events_.schedule(next_sample_, EventKind::energy_sample);
    }
    if (cfg_.harvest_tick < cfg_.horizon) {
      events_.schedule(cfg_.harvest_tick, EventKind::harvest_tick);
    }
    for (auto& s : senders_) {
      std::uniform_real_distribution<double> u(0.0, 1.0 / cfg_.traffic_rate);
      s.phase = u(s.rng);
      s.next_gen = s.phase;
    }
    decide_and_open(0.0);
  }

  // ------------------------------------------------------------ dispatch

  void dispatch(const Event& e) {
    now_ = e.time;
    if (recorder_.logging() && e.kind != EventKind::tx_end) {
      recorder_.note(now_, e.node, to_string(e.kind));
    }
    switch (e.kind) {
      case EventKind::packet_gen:
        on_packet_gen(sender(e.node));
        break;
      case EventKind::harvest_tick:
        on_harvest_tick();
        break;
      case EventKind::energy_sample:
        on_energy_sample();
        break;
      case EventKind::receiver_wake:
        if (receiver_alive_) {
          if (flush_receiver()) {
            open_window();
          }
        }
        break;
      case EventKind::round_boundary:
        after_round();
        break;
      case EventKind::tx_end:
        on_tx_end(e.token);
        break;
      case EventKind::tw_expiry:
        if (receiver_alive_ && e.token == tw_token_) {
          if (auto rxb = receiver_.on_tw_expiry(now_)) {
            transmit(protocol::kReceiverId, *rxb);
          } else {
            after_round();
          }
        }
        break;
      case EventKind::data_timeout:
        if (receiver_alive_ && e.token == data_token_) {
          receiver_.on_data_timeout(now_);
          after_round();
        }
        break;
      case EventKind::csma_attempt:
        on_attempt(sender(e.node), e.token);
        break;
      case EventKind::rxb_timeout: {
        auto& s = sender(e.node);
        if (s.alive && e.token == s.timer_token) {
          s.mac.on_rxb_timeout(now_);
          drain_evicted(s);
        }
        break;
      }
      case EventKind::ack_timeout: {
        auto& s = sender(e.node);
        if (s.alive && e.token == s.timer_token) {
          s.mac.on_ack_timeout(now_);
          drain_evicted(s);
        }
        break;
      }
    }
  }

  SenderNode& sender(NodeId id) { return senders_[id - 1]; }

  // Timers that can no longer do anything when they fire.
  bool stale(const Event& e) {
    switch (e.kind) {
      case EventKind::tw_expiry:
        return !receiver_alive_ || e.token != tw_token_;
      case EventKind::data_timeout:
        return !receiver_alive_ || e.token != data_token_;
      case EventKind::csma_attempt:
        return e.token != sender(e.node).attempt_token;
      case EventKind::rxb_timeout: {
        const auto& s = sender(e.node);
        return !s.alive || e.token != s.timer_token || s.mac.phase() != SenderPhase::awaiting_rxb;
      }
      case EventKind::ack_timeout: {
        const auto& s = sender(e.node);
        return !s.alive || e.token != s.timer_token || s.mac.phase() != SenderPhase::awaiting_ack;
      }
      default:
        return false;
    }
  }

  // ------------------------------------------------------------ traffic

  // Packet generation is periodic per sender, so it lives outside the heap.
  std::size_t next_generator() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < senders_.size(); ++i) {
      if (senders_[i].next_gen < senders_[best].next_gen) {
        best = i;
      }
    }
    return best;
  }

  void on_packet_gen(SenderNode& s) {
    if (!s.alive) {
      s.next_gen = std::numeric_limits<double>::infinity();
      return;
    }
    protocol::Packet packet;
    packet.id = static_cast<std::uint32_t>(generation_times_.size());
    packet.origin = s.mac.id();
    packet.generated_at = now_;
    if (cfg_.fixed_priority) {
      packet.priority = *cfg_.fixed_priority;
    } else {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      packet.priority = protocol::assign_priority(u(s.rng));
    }
    generation_times_.push_back(now_);
    delivered_flags_.push_back(false);
    recorder_.generated(now_, packet.origin, packet.id, packet.priority);
    if (auto evicted = s.mac.enqueue(packet)) {
      recorder_.dropped(now_, packet.origin, evicted->id, evicted->priority);
    }
    ++s.generated;
    const double next = s.phase + static_cast<double>(s.generated) / cfg_.traffic_rate;
    s.next_gen = next < cfg_.horizon ? next : std::numeric_limits<double>::infinity();
  }

  void drain_evicted(SenderNode& s) {
    if (!s.mac.has_evicted()) {
      return;
    }
    for (const auto& p : s.mac.take_evicted()) {
      recorder_.dropped(now_, p.origin, p.id, p.priority);
    }
  }

  // ------------------------------------------------------------ energy

  // Harvest energy between two instants under the piecewise-constant slot power.
  std::pair<double, double> harvest_between(double a, double b) const {
    double solar = 0.0;
    double wind = 0.0;
    const double ds = cfg_.harvest.slot_duration;
    while (a < b) {
      const auto k = std::min(static_cast<std::size_t>(a / ds), slots_.size() - 1);
      const double slot_end = static_cast<double>(k + 1) * ds;
      const double upto = std::min(b, slot_end <= a ? b : slot_end);
      const double frac = (upto - a) / ds;
      solar += slots_[k].solar_energy * frac;
      wind += slots_[k].wind_energy * frac;
      a = upto;
    }
    return {solar, wind};
  }

  const trace::SlotEnergy& slot_at(double t) const {
    const auto k = static_cast<std::size_t>(t / cfg_.harvest.slot_duration);
    return slots_[std::min(k, slots_.size() - 1)];
  }

  void credit_receiver(double upto) {
    if (receiver_alive_ && upto > last_credit_) {
      const auto [solar, wind] = harvest_between(last_credit_, upto);
      receiver_ledger_.credit_harvest(solar, wind);
    }
    last_credit_ = std::max(last_credit_, upto);
  }

  bool flush_receiver() {
    if (!receiver_alive_) {
      return false;
    }
    if (auto died = receiver_meter_.advance(receiver_ledger_, now_)) {
      kill_receiver(*died);
      return false;
    }
    return true;
  }

  bool receiver_state(RadioState state) {
    if (!receiver_alive_) {
      return false;
    }
    if (auto died = receiver_meter_.switch_to(receiver_ledger_, state, now_)) {
      kill_receiver(*died);
      return false;
    }
    return true;
  }

  void kill_receiver(double when) {
    receiver_alive_ = false;
    receiver_.sleep();
    ++tw_token_;
    ++data_token_;
    recorder_.node_dead(when, protocol::kReceiverId);
    recorder_.duty_cycle(when, 0.0);
    current_dc_ = 0.0;
  }

  bool sender_state(SenderNode& s, RadioState state) {
    if (!s.alive) {
      return false;
    }
    if (auto died = s.meter.switch_to(s.ledger, state, now_)) {
      kill_sender(s, *died);
      return false;
    }
    return true;
  }

  void flush_sender(SenderNode& s) {
    if (s.alive) {
      if (auto died = s.meter.advance(s.ledger, now_)) {
        kill_sender(s, *died);
      }
    }
  }

  void kill_sender(SenderNode& s, double when) {
    s.alive = false;
    ++s.attempt_token;
    ++s.timer_token;
    recorder_.node_dead(when, s.mac.id());
  }

  void on_harvest_tick() {
    flush_receiver();
    for (auto& s : senders_) {
      flush_sender(s);
    }
    credit_receiver(now_);
    const double next = now_ + cfg_.harvest_tick;
    if (next < cfg_.horizon) {
      events_.schedule(next, EventKind::harvest_tick);
    }
  }

  void on_energy_sample() {
    flush_receiver();
    recorder_.energy_sample(now_, receiver_ledger_.remaining_total_percent());
    next_sample_ += cfg_.sample_interval;
    if (next_sample_ < cfg_.horizon) {
      events_.schedule(next_sample_, EventKind::energy_sample);
    }
  }

  double policy_re_pct() const {
    double pct = receiver_ledger_.remaining_total_percent();
    if (cfg_.forecast_harvest) {
      const double ds = cfg_.harvest.slot_duration;
      const auto k = static_cast<double>(std::min(static_cast<std::size_t>(now_ / ds),
                                                  slots_.size() - 1));
      const double left = std::max(0.0, (k + 1.0) * ds - now_);
      const double expected = slot_at(now_).total() * left / ds;
      pct = std::min(100.0, pct + 100.0 * expected / receiver_ledger_.e_max());
    }
    return pct;
  }

  // ------------------------------------------------------------ receiver

  void decide_and_open(double now) {
    now_ = now;
    if (!flush_receiver()) {
      return;
    }
    const auto decision = policy::decide(slot_at(now_), policy_re_pct(), cfg_.policy);
    if (!have_dc_ || decision.d_c != current_dc_) {
      recorder_.duty_cycle(now_, decision.d_c);
      current_dc_ = decision.d_c;
      have_dc_ = true;
    }
    if (decision.t_sleep > 0.0) {
      receiver_.sleep();
      if (receiver_state(RadioState::sleep)) {
        events_.schedule(now_ + decision.t_sleep, EventKind::receiver_wake);
      }
      return;
    }
    open_window();
  }

  void open_window() {
    if (!receiver_state(RadioState::receive)) {
      return;
    }
    receiver_.begin_window(now_, cfg_.policy.t_listen);
    start_round();
  }

  void after_round() {
    if (!receiver_alive_) {
      return;
    }
    if (receiver_.window_open(now_)) {
      start_round();
    } else {
      decide_and_open(now_);
    }
  }

  bool sender_quiet(const SenderNode& s, bool energy_ok) const {
    if (!s.alive) {
      return true;
    }
    const auto phase = s.mac.phase();
    if (phase != SenderPhase::sleeping && phase != SenderPhase::awaiting_wb) {
      return false;
    }
    return !energy_ok || !s.mac.has_work();
  }

  void start_round() {
    if (!flush_receiver()) {
      return;
    }
    const double re = receiver_ledger_.remaining_total_percent();
    if (channel_.idle() && try_fast_forward(re)) {
      return;
    }
    const auto wb = receiver_.start_round(now_, re);
    transmit(protocol::kReceiverId, wb);
  }

  // Skips whole rounds in which nobody can answer the WB. Each skipped round
  // costs one WB airtime in transmit and T_w in receive.
  bool try_fast_forward(double re) {
    const bool energy_ok = re >= cfg_.e_s_threshold;
    for (const auto& s : senders_) {
      if (!sender_quiet(s, energy_ok)) {
        return false;
      }
    }
    while (!events_.empty() && stale(events_.top())) {
      events_.pop();
    }
    const double next_event = events_.empty() ? cfg_.horizon
                                              : std::min(events_.top().time, cfg_.horizon);
    // A packet generated after a WB has finished waits for the next WB, so
    // generation only limits which WBs may be skipped.
    const double next_gen = energy_ok ? senders_[next_generator()].next_gen
                                      : std::numeric_limits<double>::infinity();
    const double round = wb_air_ + cfg_.t_w;
    const double window_end = receiver_.window_end();
    const auto fits = [&](std::uint64_t i) {
      const double s = now_ + static_cast<double>(i) * round;
      return s < window_end && s + wb_air_ < next_gen && s + round <= next_event;
    };
    const double by_event = std::floor((next_event - now_) / round);
    const double by_start = std::ceil((std::min(window_end, next_gen) - now_) / round);
    std::uint64_t n = static_cast<std::uint64_t>(
        std::max(0.0, std::min({by_event, by_start, 1e15}) - 1.0));
    while (n > 0 && !fits(n - 1)) {
      --n;
    }
    while (fits(n)) {
      ++n;
    }
    const double t = now_ + static_cast<double>(n) * round;
    if (n == 0) {
      return false;
    }
    const double skipped = static_cast<double>(n);
    if (auto died = receiver_meter_.charge(receiver_ledger_, RadioState::transmit,
                                           skipped * wb_air_)) {
      kill_receiver(*died);
      return true;
    }
    if (auto died = receiver_meter_.charge(receiver_ledger_, RadioState::receive,
                                           skipped * cfg_.t_w)) {
      kill_receiver(*died + skipped * wb_air_);
      return true;
    }
    receiver_meter_.reset_clock(t);
    if (recorder_.logging()) {
      recorder_.note(now_, protocol::kReceiverId, "idle_rounds", fmt::format("{}", n));
    }
    events_.schedule(t, EventKind::round_boundary);
    return true;
  }

  // ------------------------------------------------------------ channel

  void transmit(NodeId source, const protocol::Frame& frame) {
    const auto kind = protocol::kind_of(frame);
    const double end = now_ + airtime_[static_cast<std::size_t>(kind)];
    const auto encoded = protocol::encode_frame(frame);
    std::uint32_t id = 0;
    const auto lost = channel_.begin(source, encoded, now_, end, id);
    if (lost > 0) {
      recorder_.collided(now_, source, lost);
    }
    if (recorder_.logging()) {
      recorder_.note(now_, source, "tx", protocol::to_string(kind));
    }
    events_.schedule(end, EventKind::tx_end, source, id);
    if (source == protocol::kReceiverId) {
      receiver_state(RadioState::transmit);
    } else {
      sender_state(sender(source), RadioState::transmit);
    }
    // Carrier sense interrupts every attempt scheduled after this start.
    for (auto& s : senders_) {
      if (s.attempt_pending && s.attempt_time > now_) {
        s.attempt_pending = false;
        ++s.attempt_token;
        s.waiting_idle = true;
      }
    }
  }

  void on_tx_end(std::uint32_t id) {
    const auto tx = channel_.finish(id);
    if (recorder_.logging()) {
      recorder_.note(now_, tx.source, "tx_end", tx.collided ? "collided" : "ok");
    }
    const auto frame = protocol::decode_frame(tx.frame.view());
    if (tx.source == protocol::kReceiverId) {
      receiver_sent(tx, frame);
    } else {
      sender_sent(sender(tx.source), tx, frame);
    }
    if (channel_.idle()) {
      resume_waiting();
    }
  }

  void receiver_sent(const Transmission& tx, const protocol::Frame& frame) {
    if (!receiver_state(RadioState::receive)) {
      return;
    }
    if (const auto* wb = std::get_if<protocol::WakeupBeacon>(&frame)) {
      const double deadline = receiver_.on_wb_sent(now_);
      events_.schedule(deadline, EventKind::tw_expiry, 0, ++tw_token_);
      if (!tx.collided) {
        for (auto& s : senders_) {
          if (s.alive && s.mac.on_wb(*wb, now_)) {
            drain_evicted(s);
            ++s.timer_token;
            schedule_attempt(s, now_);
          } else if (s.alive) {
            drain_evicted(s);
          }
        }
      }
    } else if (const auto* rxb = std::get_if<protocol::RxBeacon>(&frame)) {
      const double deadline = receiver_.on_rxb_sent(now_);
      events_.schedule(deadline, EventKind::data_timeout, 0, ++data_token_);
      if (!tx.collided) {
        for (auto& s : senders_) {
          if (!s.alive) {
            continue;
          }
          auto data = s.mac.on_rxb(*rxb, now_);
          drain_evicted(s);
          if (data) {
            ++s.timer_token;
            transmit(s.mac.id(), *data);
          }
        }
      }
    } else if (const auto* ack = std::get_if<protocol::Ack>(&frame)) {
      receiver_.on_ack_sent(now_);
      if (!tx.collided && ack->da >= 1 && ack->da <= senders_.size()) {
        auto& s = sender(ack->da);
        if (s.alive && s.mac.on_ack(*ack, now_)) {
          ++s.timer_token;
        }
      }
      after_round();
    }
  }

  void sender_sent(SenderNode& s, const Transmission& tx, const protocol::Frame& frame) {
    if (!sender_state(s, RadioState::receive)) {
      return;
    }
    if (const auto* txb = std::get_if<protocol::TxBeacon>(&frame)) {
      const double deadline = s.mac.on_txb_sent(now_);
      events_.schedule(deadline, EventKind::rxb_timeout, s.mac.id(), ++s.timer_token);
      if (!tx.collided && receiver_alive_) {
        const auto outcome = receiver_.on_txb(*txb, now_);
        if (outcome.kind == protocol::TxbOutcome::Kind::select_now) {
          ++tw_token_;
          transmit(protocol::kReceiverId, *outcome.rxb);
        } else if (outcome.deadline_changed) {
          events_.schedule(outcome.deadline, EventKind::tw_expiry, 0, ++tw_token_);
        }
      }
    } else if (const auto* data = std::get_if<protocol::DataFrame>(&frame)) {
      const double deadline = s.mac.on_data_sent(now_);
      events_.schedule(deadline, EventKind::ack_timeout, s.mac.id(), ++s.timer_token);
      if (!tx.collided && receiver_alive_) {
        if (auto ack = receiver_.on_data(*data, now_)) {
          ++data_token_;
          channel_.check_clean(tx);
          if (data->packet_id < delivered_flags_.size() && !delivered_flags_[data->packet_id]) {
            delivered_flags_[data->packet_id] = true;
            recorder_.record_delay(generation_times_[data->packet_id], now_, data->sa,
                                   data->packet_id, data->priority);
          }
          transmit(protocol::kReceiverId, *ack);
        }
      }
    }
  }

  // ------------------------------------------------------------ CSMA

  void schedule_attempt(SenderNode& s, double base) {
    int k = 0;
    if (cfg_.csma_p < 1.0) {
      std::geometric_distribution<int> g(cfg_.csma_p);
      k = g(s.rng);
    }
    s.attempt_time = base + static_cast<double>(k + 1) * cfg_.csma_slot;
    s.attempt_pending = true;
    s.waiting_idle = false;
    events_.schedule(s.attempt_time, EventKind::csma_attempt, s.mac.id(), ++s.attempt_token);
  }

  void on_attempt(SenderNode& s, std::uint32_t token) {
    if (!s.alive || token != s.attempt_token) {
      return;
    }
    s.attempt_pending = false;
    if (s.mac.phase() != SenderPhase::contending) {
      return;
    }
    if (!s.mac.contention_open(now_)) {
      s.mac.give_up();
      return;
    }
    if (channel_.busy(now_)) {
      s.waiting_idle = true;
      return;
    }
    const auto txb = s.mac.start_txb(now_);
    transmit(s.mac.id(), txb);
  }

  void resume_waiting() {
    for (auto& s : senders_) {
      if (!s.waiting_idle) {
        continue;
      }
      s.waiting_idle = false;
      if (!s.alive || s.mac.phase() != SenderPhase::contending) {
        continue;
      }
      if (s.mac.contention_open(now_)) {
        schedule_attempt(s, now_);
      } else {
        s.mac.give_up();
      }
    }
  }

  // ------------------------------------------------------------ wrap-up

  void finish() {
    now_ = cfg_.horizon;
    flush_receiver();
    for (auto& s : senders_) {
      flush_sender(s);
    }
    credit_receiver(cfg_.horizon);
    const double final_pct = receiver_ledger_.remaining_total_percent();
    if (cfg_.horizon > 0.0 && (metrics_.energy_trajectory.empty() ||
                               metrics_.energy_trajectory.back().time < cfg_.horizon)) {
      recorder_.energy_sample(cfg_.horizon, final_pct);
    }

    double eno_seconds = 0.0;
    const double ds = cfg_.harvest.slot_duration;
    for (std::size_t k = 0; k < slots_.size(); ++k) {
      const double begin = static_cast<double>(k) * ds;
      if (begin >= cfg_.horizon) {
        break;
      }
      const auto seen = policy::visible_harvest(cfg_.policy.kind, slots_[k]);
      if (energy::eno_achieved(seen, cfg_.policy.e_c)) {
        eno_seconds += std::min(begin + ds, cfg_.horizon) - begin;
      }
    }

    double residual = receiver_ledger_.audit_residual();
    double scale = receiver_ledger_.initial() + receiver_ledger_.total_credited();
    check_ledger(receiver_ledger_, "receiver");
    for (const auto& s : senders_) {
      residual += s.ledger.audit_residual();
      scale += s.ledger.initial() + s.ledger.total_credited();
      check_ledger(s.ledger, "sender");
    }
    const double audit = scale > 0.0 ? std::abs(residual) / scale : std::abs(residual);
    if (audit > 1e-9) {
      throw InvariantViolation(fmt::format("energy audit off by {} (relative)", audit));
    }
    recorder_.finish(cfg_.horizon, final_pct, eno_seconds / 3600.0, audit);
  }

  void check_ledger(const energy::EnergyLedger& ledger, const char* who) const {
    const double booked = ledger.total_consumed();
    const double recomputed = ledger.consumed_from_state_times(cfg_.radio);
    const double scale = std::max({booked, recomputed, 1e-12});
    if (std::abs(booked - recomputed) / scale > 1e-9) {
      throw InvariantViolation(fmt::format("{} consumption {} J disagrees with P*t sum {} J", who,
                                           booked, recomputed));
    }
  }

  SimConfig cfg_;
  std::vector<trace::SlotEnergy> slots_;
  std::uint64_t seed_;
  Metrics metrics_;
  Recorder recorder_;
  protocol::MacTiming timing_;
  EventQueue events_;
  Channel channel_;

  protocol::Receiver receiver_;
  energy::EnergyLedger receiver_ledger_;
  energy::RadioMeter receiver_meter_;
  bool receiver_alive_ = true;
  std::uint32_t tw_token_ = 0;
  std::uint32_t data_token_ = 0;
  double current_dc_ = 0.0;
  bool have_dc_ = false;

  std::vector<SenderNode> senders_;
  std::vector<double> generation_times_;
  std::vector<bool> delivered_flags_;

  double now_ = 0.0;
  double last_credit_ = 0.0;
  double next_sample_ = 0.0;
  double wb_air_ = 0.0;
  std::array<double, 6> airtime_{};
};

}  // namespace

Metrics run(const SimConfig& config, std::span<const trace::SlotEnergy> slots, std::uint64_t seed,
            std::ostream* event_log) {
  config.validate();
  if (slots.empty() && config.horizon > 0.0) {
    throw ConfigError("trace", "no harvest slots");
  }
  Simulator sim(config, slots, seed, event_log);
  return sim.run();
}

}  // namespace henosim::sim
