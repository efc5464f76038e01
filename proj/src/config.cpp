#include "henosim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "henosim/errors.hpp"

namespace henosim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string number(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError(std::string(key), "not a number: '" + std::string(text) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw ConfigError(std::string(key), "must be finite");
    }
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") {
    return true;
  }
  if (text == "false" || text == "0" || text == "no") {
    return false;
  }
  throw ConfigError(std::string(key), "expected true or false");
}

std::vector<std::uint64_t> parse_seeds(std::string_view key, std::string_view text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item =
        trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start));
    const auto range = item.find("..");
    if (range != std::string_view::npos) {
      const auto lo = parse_number<std::uint64_t>(key, trim(item.substr(0, range)));
      const auto hi = parse_number<std::uint64_t>(key, trim(item.substr(range + 2)));
      if (hi < lo) {
        throw ConfigError(std::string(key), "empty seed range");
      }
      for (auto s = lo; s <= hi; ++s) {
        seeds.push_back(s);
      }
    } else {
      seeds.push_back(parse_number<std::uint64_t>(key, item));
    }
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return seeds;
}

struct Key {
  const char* name;
  std::function<void(SimConfig&, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

#define HENOSIM_DOUBLE_KEY(name, member)                                                      \
  Key {                                                                                       \
    name, [](SimConfig& c, std::string_view v) { c.member = parse_number<double>(name, v); }, \
        [](const SimConfig& c) { return number(c.member); }                                   \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      HENOSIM_DOUBLE_KEY("horizon", horizon),
      Key{"senders", [](SimConfig& c, std::string_view v) { c.senders = parse_number<int>("senders", v); },
          [](const SimConfig& c) { return std::to_string(c.senders); }},
      Key{"policy",
          [](SimConfig& c, std::string_view v) {
            const auto kind = policy::parse_policy_kind(v);
            if (!kind) {
              throw ConfigError("policy", "unknown policy '" + std::string(v) + "'");
            }
            c.policy.kind = *kind;
          },
          [](const SimConfig& c) { return policy::to_string(c.policy.kind); }},
      Key{"harvester",
          [](SimConfig& c, std::string_view v) {
            if (v == "auto") {
              c.harvester = HarvesterMode::automatic;
            } else if (v == "hybrid") {
              c.harvester = HarvesterMode::hybrid;
            } else if (v == "solar") {
              c.harvester = HarvesterMode::solar;
            } else {
              throw ConfigError("harvester", "expected auto, hybrid or solar");
            }
          },
          [](const SimConfig& c) { return to_string(c.harvester); }},
      Key{"forecast_harvest",
          [](SimConfig& c, std::string_view v) { c.forecast_harvest = parse_bool("forecast_harvest", v); },
          [](const SimConfig& c) { return std::string(c.forecast_harvest ? "true" : "false"); }},
      HENOSIM_DOUBLE_KEY("e_th", policy.e_th),
      HENOSIM_DOUBLE_KEY("e_c", policy.e_c),
      HENOSIM_DOUBLE_KEY("t_listen", policy.t_listen),
      HENOSIM_DOUBLE_KEY("d_c_floor", policy.d_c_floor),
      HENOSIM_DOUBLE_KEY("fixed_d_c", policy.fixed_d_c),
      HENOSIM_DOUBLE_KEY("panel_area", harvest.panel_area),
      HENOSIM_DOUBLE_KEY("panel_efficiency", harvest.panel_efficiency),
      HENOSIM_DOUBLE_KEY("rotor_diameter", harvest.rotor_diameter),
      HENOSIM_DOUBLE_KEY("air_density", harvest.air_density),
      HENOSIM_DOUBLE_KEY("power_coefficient", harvest.power_coefficient),
      HENOSIM_DOUBLE_KEY("slot_duration", harvest.slot_duration),
      Key{"slots_per_day",
          [](SimConfig& c, std::string_view v) { c.harvest.slots_per_day = parse_number<int>("slots_per_day", v); },
          [](const SimConfig& c) { return std::to_string(c.harvest.slots_per_day); }},
      HENOSIM_DOUBLE_KEY("p_tx", radio.transmit),
      HENOSIM_DOUBLE_KEY("p_rx", radio.receive),
      HENOSIM_DOUBLE_KEY("p_sleep", radio.sleep),
      HENOSIM_DOUBLE_KEY("voltage", radio.voltage),
      HENOSIM_DOUBLE_KEY("battery_mah", battery.capacity_mah),
      HENOSIM_DOUBLE_KEY("initial_pct", battery.initial_pct),
      HENOSIM_DOUBLE_KEY("sender_battery_mah", sender_battery.capacity_mah),
      HENOSIM_DOUBLE_KEY("sender_initial_pct", sender_battery.initial_pct),
      HENOSIM_DOUBLE_KEY("traffic_rate", traffic_rate),
      Key{"priority",
          [](SimConfig& c, std::string_view v) {
            if (v == "random") {
              c.fixed_priority.reset();
              return;
            }
            for (auto p : {protocol::Priority::P1, protocol::Priority::P2, protocol::Priority::P3,
                           protocol::Priority::P4}) {
              if (v == protocol::to_string(p)) {
                c.fixed_priority = p;
                return;
              }
            }
            throw ConfigError("priority", "expected random, P1, P2, P3 or P4");
          },
          [](const SimConfig& c) {
            return std::string(c.fixed_priority ? protocol::to_string(*c.fixed_priority) : "random");
          }},
      HENOSIM_DOUBLE_KEY("csma_p", csma_p),
      HENOSIM_DOUBLE_KEY("csma_slot", csma_slot),
      HENOSIM_DOUBLE_KEY("t_w", t_w),
      HENOSIM_DOUBLE_KEY("data_rate", data_rate),
      Key{"queue_capacity",
          [](SimConfig& c, std::string_view v) {
            c.queue_capacity = parse_number<std::size_t>("queue_capacity", v);
          },
          [](const SimConfig& c) { return std::to_string(c.queue_capacity); }},
      HENOSIM_DOUBLE_KEY("e_s_threshold", e_s_threshold),
      HENOSIM_DOUBLE_KEY("harvest_tick", harvest_tick),
      HENOSIM_DOUBLE_KEY("sample_interval", sample_interval),
      Key{"seeds", [](SimConfig& c, std::string_view v) { c.seeds = parse_seeds("seeds", v); },
          [](const SimConfig& c) {
            std::string out;
            for (std::size_t i = 0; i < c.seeds.size(); ++i) {
              out += (i == 0 ? "" : ",") + std::to_string(c.seeds[i]);
            }
            return out;
          }},
      Key{"trace", [](SimConfig& c, std::string_view v) { c.trace_path = std::string(v); },
          [](const SimConfig& c) { return c.trace_path; }},
      Key{"partial_slots",
          [](SimConfig& c, std::string_view v) { c.partial_slots = parse_bool("partial_slots", v); },
          [](const SimConfig& c) { return std::string(c.partial_slots ? "true" : "false"); }},
      Key{"synthetic",
          [](SimConfig& c, std::string_view v) {
            const auto kind = parse_synthetic_kind(v);
            if (!kind) {
              throw ConfigError("synthetic", "unknown synthetic trace kind '" + std::string(v) + "'");
            }
            c.synthetic.kind = *kind;
          },
          [](const SimConfig& c) { return to_string(c.synthetic.kind); }},
      HENOSIM_DOUBLE_KEY("sample_period", synthetic.sample_period),
      HENOSIM_DOUBLE_KEY("peak_irradiance", synthetic.peak_irradiance),
      HENOSIM_DOUBLE_KEY("sunrise_hour", synthetic.sunrise_hour),
      HENOSIM_DOUBLE_KEY("sunset_hour", synthetic.sunset_hour),
      HENOSIM_DOUBLE_KEY("night_wind", synthetic.night_wind),
      HENOSIM_DOUBLE_KEY("day_wind", synthetic.day_wind),
      HENOSIM_DOUBLE_KEY("gust", synthetic.gust),
      HENOSIM_DOUBLE_KEY("flat_irradiance", synthetic.flat_irradiance),
      HENOSIM_DOUBLE_KEY("flat_wind", synthetic.flat_wind),
      Key{"trace_seed",
          [](SimConfig& c, std::string_view v) { c.synthetic.seed = parse_number<std::uint64_t>("trace_seed", v); },
          [](const SimConfig& c) { return std::to_string(c.synthetic.seed); }},
  };
  return table;
}

#undef HENOSIM_DOUBLE_KEY

void require(bool ok, const char* key, const char* message) {
  if (!ok) {
    throw ConfigError(key, message);
  }
}

}  // namespace

std::string to_string(HarvesterMode mode) {
  switch (mode) {
    case HarvesterMode::automatic:
      return "auto";
    case HarvesterMode::hybrid:
      return "hybrid";
    case HarvesterMode::solar:
      return "solar";
  }
  return "?";
}

void SimConfig::validate() const {
  require(horizon >= 0.0, "horizon", "must be >= 0");
  require(senders >= 1 && senders <= 255, "senders", "must be in [1, 255]");
  policy.validate();

  try {
    harvest.validate();
  } catch (const DomainError& e) {
    throw ConfigError("harvest", e.what());
  }
  try {
    radio.validate();
  } catch (const DomainError& e) {
    throw ConfigError("radio", e.what());
  }

  require(battery.capacity_mah > 0.0, "battery_mah", "must be > 0");
  require(battery.initial_pct >= 0.0 && battery.initial_pct <= 100.0, "initial_pct",
          "must be in [0, 100]");
  require(sender_battery.capacity_mah > 0.0, "sender_battery_mah", "must be > 0");
  require(sender_battery.initial_pct > 0.0 && sender_battery.initial_pct <= 100.0,
          "sender_initial_pct", "must be in (0, 100]");
  require(traffic_rate > 0.0, "traffic_rate", "must be > 0");
  require(csma_p > 0.0 && csma_p <= 1.0, "csma_p", "must be in (0, 1]");
  require(csma_slot > 0.0, "csma_slot", "must be > 0");
  require(t_w > 0.0, "t_w", "must be > 0");
  require(data_rate > 0.0, "data_rate", "must be > 0");
  require(queue_capacity >= 1, "queue_capacity", "must be >= 1");
  require(e_s_threshold >= 0.0 && e_s_threshold <= 100.0, "e_s_threshold", "must be in [0, 100]");
  require(harvest_tick > 0.0, "harvest_tick", "must be > 0");
  require(sample_interval > 0.0, "sample_interval", "must be > 0");
  require(!seeds.empty(), "seeds", "at least one seed required");
  synthetic.validate();
}

bool SimConfig::harvests_wind() const {
  switch (harvester) {
    case HarvesterMode::hybrid:
      return true;
    case HarvesterMode::solar:
      return false;
    case HarvesterMode::automatic:
      break;
  }
  return policy::uses_wind(policy.kind);
}

SimConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  SimConfig config;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    ++line_no;
    const auto newline = text.find('\n', start);
    auto line = text.substr(start, newline == std::string_view::npos ? newline : newline - start);
    start = newline == std::string_view::npos ? text.size() : newline + 1;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [key](const Key& k) { return key == k.name; });
    if (it == table.end()) {
      throw ConfigError(std::string(key), "unknown key");
    }
    it->set(config, value);
  }

  if (!config.trace_path.empty() && !base_dir.empty()) {
    std::filesystem::path p(config.trace_path);
    if (p.is_relative()) {
      config.trace_path = (base_dir / p).lexically_normal().string();
    }
  }
  config.validate();
  return config;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("", "cannot read config file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto config = parse_config(buffer.str(), path.parent_path());
  if (!config.trace_path.empty() && !std::filesystem::exists(config.trace_path)) {
    throw ConfigError("trace", "trace file not found: " + config.trace_path);
  }
  return config;
}

std::string config_echo(const SimConfig& config) {
  std::string out;
  for (const auto& key : keys()) {
    out += key.name;
    out += " = ";
    out += key.get(config);
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace henosim
