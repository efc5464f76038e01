#include "henosim/trace.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>
#include <string_view>

#include "henosim/errors.hpp"

namespace henosim::trace {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_field(std::string_view field, std::size_t line, const char* name) {
  field = trim(field);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty() || !std::isfinite(value)) {
    throw ParseError(line, std::string("bad ") + name + " '" + std::string(field) + "'");
  }
  return value;
}

void append_number(std::string& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

}  // namespace

void HarvestConfig::validate() const {
  if (!(panel_area > 0.0)) {
    throw DomainError("panel_area must be > 0");
  }
  if (!(panel_efficiency > 0.0 && panel_efficiency <= 1.0)) {
    throw DomainError("panel_efficiency must be in (0, 1]");
  }
  if (!(rotor_diameter > 0.0)) {
    throw DomainError("rotor_diameter must be > 0");
  }
  if (!(air_density > 0.0)) {
    throw DomainError("air_density must be > 0");
  }
  if (!(power_coefficient > 0.0 && power_coefficient < 1.0)) {
    throw DomainError("power_coefficient must be in (0, 1)");
  }
  if (!(slot_duration > 0.0)) {
    throw DomainError("slot_duration must be > 0");
  }
  if (slots_per_day <= 0) {
    throw DomainError("slots_per_day must be > 0");
  }
}

double HarvestConfig::swept_area() const {
  const double radius = rotor_diameter / 2.0;
  return std::numbers::pi * radius * radius;
}

HarvestTrace parse_trace(std::istream& in) {
  HarvestTrace samples;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) {
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }

    std::string_view fields[3];
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = row.find(',', start);
      if (count == 3) {
        throw ParseError(line_no, "expected 3 columns");
      }
      fields[count++] = row.substr(start, comma == std::string_view::npos ? comma : comma - start);
      if (comma == std::string_view::npos) {
        break;
      }
      start = comma + 1;
    }
    if (count != 3) {
      throw ParseError(line_no, "expected 3 columns");
    }

    HarvestSample sample{parse_field(fields[0], line_no, "timestamp"),
                         parse_field(fields[1], line_no, "irradiance"),
                         parse_field(fields[2], line_no, "wind speed")};
    if (sample.irradiance < 0.0) {
      throw DomainError("line " + std::to_string(line_no) + ": negative irradiance");
    }
    if (sample.wind_speed < 0.0) {
      throw DomainError("line " + std::to_string(line_no) + ": negative wind speed");
    }
    if (!samples.empty() && sample.timestamp <= samples.back().timestamp) {
      throw ParseError(line_no, "timestamps must be strictly increasing");
    }
    samples.push_back(sample);
  }

  if (samples.empty()) {
    throw EmptyInputError("trace contains no samples");
  }
  return samples;
}

void write_trace(std::ostream& out, const HarvestTrace& trace) {
  std::string text = "timestamp_s,irradiance_wm2,wind_speed_ms\n";
  for (const auto& s : trace) {
    append_number(text, s.timestamp);
    text += ',';
    append_number(text, s.irradiance);
    text += ',';
    append_number(text, s.wind_speed);
    text += '\n';
  }
  out << text;
}

double solar_slot_energy(double mean_irradiance, const HarvestConfig& cfg) {
  if (mean_irradiance < 0.0) {
    throw DomainError("irradiance must be >= 0");
  }
  return cfg.panel_area * cfg.panel_efficiency * mean_irradiance * cfg.slot_duration;
}

double wind_slot_energy(double mean_wind_speed, const HarvestConfig& cfg) {
  if (mean_wind_speed < 0.0) {
    throw DomainError("wind speed must be >= 0");
  }
  const double v = mean_wind_speed;
  return 0.5 * v * v * v * cfg.swept_area() * cfg.air_density * cfg.power_coefficient *
         cfg.slot_duration;
}

double trace_end(const HarvestTrace& trace) {
  if (trace.empty()) {
    return 0.0;
  }
  if (trace.size() == 1) {
    return trace.front().timestamp;
  }
  const auto n = trace.size();
  return trace[n - 1].timestamp + (trace[n - 1].timestamp - trace[n - 2].timestamp);
}

std::vector<SlotEnergy> slot_aggregate(const HarvestTrace& trace, const HarvestConfig& cfg,
                                       bool allow_partial) {
  if (trace.empty()) {
    throw EmptyInputError("trace contains no samples");
  }
  cfg.validate();

  const double origin = trace.front().timestamp;
  const double span = trace_end(trace) - origin;
  auto slot_count = static_cast<std::size_t>(std::floor(span / cfg.slot_duration));
  const bool has_partial = span - static_cast<double>(slot_count) * cfg.slot_duration > 0.0;
  if (allow_partial && (has_partial || slot_count == 0)) {
    ++slot_count;
  }
  if (slot_count == 0) {
    throw DomainError("trace is shorter than one slot");
  }

  std::vector<SlotEnergy> slots;
  slots.reserve(slot_count);
  std::size_t next = 0;
  HarvestSample held = trace.front();
  for (std::size_t k = 0; k < slot_count; ++k) {
    const double window_end = origin + static_cast<double>(k + 1) * cfg.slot_duration;
    double irr_sum = 0.0;
    double wind_sum = 0.0;
    std::size_t n = 0;
    while (next < trace.size() && trace[next].timestamp < window_end) {
      irr_sum += trace[next].irradiance;
      wind_sum += trace[next].wind_speed;
      held = trace[next];
      ++n;
      ++next;
    }
    const double irr = n > 0 ? irr_sum / static_cast<double>(n) : held.irradiance;
    const double wind = n > 0 ? wind_sum / static_cast<double>(n) : held.wind_speed;
    slots.push_back({k, solar_slot_energy(irr, cfg), wind_slot_energy(wind, cfg)});
  }
  return slots;
}

}  // namespace henosim::trace
