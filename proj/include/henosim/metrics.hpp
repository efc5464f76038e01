#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "henosim/frame.hpp"

namespace henosim::sim {

struct TimeValue {
  double time = 0.0;
  double value = 0.0;
  friend bool operator==(const TimeValue&, const TimeValue&) = default;
};

/// Raw results of one run.
struct Metrics {
  double horizon = 0.0;
  std::array<std::vector<double>, protocol::kPriorityCount> delays;  // s, by priority
  std::vector<TimeValue> energy_trajectory;  // receiver RE_total %
  std::vector<TimeValue> duty_cycle_trace;   // receiver d_c, one entry per change
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t collided = 0;   // frames destroyed by overlap
  std::uint64_t dropped = 0;    // buffer evictions
  std::uint64_t sender_deaths = 0;
  double final_re_pct = 0.0;
  double eno_hours = 0.0;
  double energy_audit_error = 0.0;  // relative
  std::optional<double> receiver_death;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Single entry point for every metric update. When given a stream it also
/// writes the event log: one line per event, `<time> <node> <kind> [fields]`,
/// with times printed in shortest round-trip form. Replaying the metric
/// lines of a log through a fresh recorder rebuilds identical Metrics.
class Recorder {
 public:
  explicit Recorder(Metrics& metrics, std::ostream* log = nullptr);

  [[nodiscard]] bool logging() const { return log_ != nullptr; }

  /// Log-only line for protocol events.
  void note(double time, int node, std::string_view kind, std::string_view detail = {});

  void generated(double time, protocol::NodeId node, std::uint32_t packet,
                 protocol::Priority priority);
  /// Appends delivery - generation under the packet's priority. A negative
  /// delay throws InvariantViolation.
  void record_delay(double generation_time, double delivery_time, protocol::NodeId node,
                    std::uint32_t packet, protocol::Priority priority);
  void dropped(double time, protocol::NodeId node, std::uint32_t packet,
               protocol::Priority priority);
  void collided(double time, protocol::NodeId node, std::uint32_t frames);
  void energy_sample(double time, double re_pct);
  void duty_cycle(double time, double d_c);
  void node_dead(double time, protocol::NodeId node);
  void finish(double horizon, double final_re_pct, double eno_hours, double audit_error);

 private:
  void line(double time, int node, std::string_view kind, std::string_view rest);

  Metrics* metrics_;
  std::ostream* log_;
};

/// Rebuilds Metrics from the metric-bearing lines of an event log.
Metrics replay_event_log(std::istream& in);

struct RunSummary {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t collided = 0;
  std::uint64_t dropped = 0;
  std::uint64_t pending = 0;
  double delivery_ratio = 0.0;
  std::optional<double> mean_delay;
  std::array<std::optional<double>, protocol::kPriorityCount> mean_delay_by_priority;
  std::array<std::uint64_t, protocol::kPriorityCount> delivered_by_priority{};
  double final_re_pct = 0.0;
  double min_re_pct = 0.0;
  double eno_hours = 0.0;
  double hours_at_full_duty = 0.0;
  double mean_duty_cycle = 0.0;  // time weighted
  std::optional<double> receiver_death_hours;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

/// Empty sample sets are reported as absent, not zero.
RunSummary summarize(const Metrics& metrics);

}  // namespace henosim::sim
