#include "henosim/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "henosim/errors.hpp"

namespace henosim::sim {

Recorder::Recorder(Metrics& metrics, std::ostream* log) : metrics_(&metrics), log_(log) {}

void Recorder::line(double time, int node, std::string_view kind, std::string_view rest) {
  fmt::memory_buffer buf;
  if (node < 0) {
    fmt::format_to(std::back_inserter(buf), "{} * {}", time, kind);
  } else {
    fmt::format_to(std::back_inserter(buf), "{} {} {}", time, node, kind);
  }
  if (!rest.empty()) {
    buf.push_back(' ');
    buf.append(rest);
  }
  buf.push_back('\n');
  log_->write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void Recorder::note(double time, int node, std::string_view kind, std::string_view detail) {
  if (log_ != nullptr) {
    line(time, node, kind, detail);
  }
}

void Recorder::generated(double time, protocol::NodeId node, std::uint32_t packet,
                         protocol::Priority priority) {
  ++metrics_->generated;
  if (log_ != nullptr) {
    line(time, node, "gen", fmt::format("{} {}", packet, protocol::level_of(priority)));
  }
}

void Recorder::record_delay(double generation_time, double delivery_time, protocol::NodeId node,
                            std::uint32_t packet, protocol::Priority priority) {
  const double delay = delivery_time - generation_time;
  if (delay < 0.0) {
    throw InvariantViolation(fmt::format("packet {} delivered {} s before it was generated",
                                         packet, -delay));
  }
  metrics_->delays[protocol::index_of(priority)].push_back(delay);
  ++metrics_->delivered;
  if (log_ != nullptr) {
    line(delivery_time, node, "deliver",
         fmt::format("{} {} {}", packet, protocol::level_of(priority), generation_time));
  }
}

void Recorder::dropped(double time, protocol::NodeId node, std::uint32_t packet,
                       protocol::Priority priority) {
  ++metrics_->dropped;
  if (log_ != nullptr) {
    line(time, node, "drop", fmt::format("{} {}", packet, protocol::level_of(priority)));
  }
}

void Recorder::collided(double time, protocol::NodeId node, std::uint32_t frames) {
  metrics_->collided += frames;
  if (log_ != nullptr) {
    line(time, node, "collide", fmt::format("{}", frames));
  }
}

void Recorder::energy_sample(double time, double re_pct) {
  metrics_->energy_trajectory.push_back({time, re_pct});
  if (log_ != nullptr) {
    line(time, 0, "energy", fmt::format("{}", re_pct));
  }
}

void Recorder::duty_cycle(double time, double d_c) {
  metrics_->duty_cycle_trace.push_back({time, d_c});
  if (log_ != nullptr) {
    line(time, 0, "dc", fmt::format("{}", d_c));
  }
}

void Recorder::node_dead(double time, protocol::NodeId node) {
  if (node == protocol::kReceiverId) {
    metrics_->receiver_death = time;
  } else {
    ++metrics_->sender_deaths;
  }
  if (log_ != nullptr) {
    line(time, node, "dead", {});
  }
}

void Recorder::finish(double horizon, double final_re_pct, double eno_hours, double audit_error) {
  metrics_->horizon = horizon;
  metrics_->final_re_pct = final_re_pct;
  metrics_->eno_hours = eno_hours;
  metrics_->energy_audit_error = audit_error;
  if (log_ != nullptr) {
    line(horizon, -1, "end", fmt::format("{} {} {}", final_re_pct, eno_hours, audit_error));
  }
}

namespace {

template <typename T>
T parse_token(std::istringstream& in, std::size_t line_no) {
  std::string token;
  if (!(in >> token)) {
    throw ParseError(line_no, "missing field");
  }
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(line_no, "bad field '" + token + "'");
  }
  return value;
}

protocol::Priority parse_priority(std::istringstream& in, std::size_t line_no) {
  const auto level = parse_token<int>(in, line_no);
  if (level < 1 || level > 4) {
    throw ParseError(line_no, "bad priority");
  }
  return static_cast<protocol::Priority>(level);
}

}  // namespace

Metrics replay_event_log(std::istream& in) {
  Metrics metrics;
  Recorder recorder(metrics);
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) {
      continue;
    }
    std::istringstream fields(text);
    const auto time = parse_token<double>(fields, line_no);
    std::string node_text;
    std::string kind;
    fields >> node_text >> kind;
    const auto node = [&]() -> protocol::NodeId {
      if (node_text == "*") {
        return 0;
      }
      std::istringstream n(node_text);
      return parse_token<protocol::NodeId>(n, line_no);
    };

    if (kind == "gen") {
      const auto id = parse_token<std::uint32_t>(fields, line_no);
      recorder.generated(time, node(), id, parse_priority(fields, line_no));
    } else if (kind == "deliver") {
      const auto id = parse_token<std::uint32_t>(fields, line_no);
      const auto priority = parse_priority(fields, line_no);
      const auto generated = parse_token<double>(fields, line_no);
      recorder.record_delay(generated, time, node(), id, priority);
    } else if (kind == "drop") {
      const auto id = parse_token<std::uint32_t>(fields, line_no);
      recorder.dropped(time, node(), id, parse_priority(fields, line_no));
    } else if (kind == "collide") {
      recorder.collided(time, node(), parse_token<std::uint32_t>(fields, line_no));
    } else if (kind == "energy") {
      recorder.energy_sample(time, parse_token<double>(fields, line_no));
    } else if (kind == "dc") {
      recorder.duty_cycle(time, parse_token<double>(fields, line_no));
    } else if (kind == "dead") {
      recorder.node_dead(time, node());
    } else if (kind == "end") {
      const auto final_pct = parse_token<double>(fields, line_no);
      const auto eno = parse_token<double>(fields, line_no);
      const auto audit = parse_token<double>(fields, line_no);
      recorder.finish(time, final_pct, eno, audit);
    }
  }
  return metrics;
}

RunSummary summarize(const Metrics& metrics) {
  RunSummary s;
  s.generated = metrics.generated;
  s.delivered = metrics.delivered;
  s.collided = metrics.collided;
  s.dropped = metrics.dropped;
  s.pending = metrics.generated - std::min(metrics.generated, metrics.delivered + metrics.dropped);
  s.delivery_ratio = metrics.generated > 0 ? static_cast<double>(metrics.delivered) /
                                                 static_cast<double>(metrics.generated)
                                           : 0.0;

  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t p = 0; p < protocol::kPriorityCount; ++p) {
    const auto& samples = metrics.delays[p];
    s.delivered_by_priority[p] = samples.size();
    if (samples.empty()) {
      continue;
    }
    double sum = 0.0;
    for (const double d : samples) {
      sum += d;
    }
    s.mean_delay_by_priority[p] = sum / static_cast<double>(samples.size());
    total += sum;
    count += samples.size();
  }
  if (count > 0) {
    s.mean_delay = total / static_cast<double>(count);
  }

  s.final_re_pct = metrics.final_re_pct;
  s.min_re_pct = metrics.final_re_pct;
  for (const auto& sample : metrics.energy_trajectory) {
    s.min_re_pct = std::min(s.min_re_pct, sample.value);
  }
  s.eno_hours = metrics.eno_hours;

  const auto& trace = metrics.duty_cycle_trace;
  double full = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double start = std::min(trace[i].time, metrics.horizon);
    const double end = i + 1 < trace.size() ? std::min(trace[i + 1].time, metrics.horizon)
                                            : metrics.horizon;
    const double span = std::max(0.0, end - start);
    weighted += trace[i].value * span;
    if (trace[i].value >= 1.0) {
      full += span;
    }
  }
  s.hours_at_full_duty = full / 3600.0;
  s.mean_duty_cycle = metrics.horizon > 0.0 ? weighted / metrics.horizon : 0.0;
  if (metrics.receiver_death) {
    s.receiver_death_hours = *metrics.receiver_death / 3600.0;
  }
  return s;
}

}  // namespace henosim::sim
