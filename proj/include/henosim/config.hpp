#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "henosim/energy.hpp"
#include "henosim/frame.hpp"
#include "henosim/policy.hpp"
#include "henosim/synthetic.hpp"
#include "henosim/trace.hpp"

namespace henosim {

struct BatteryConfig {
  double capacity_mah = 3000.0;
  double initial_pct = 25.0;
};

/// Where harvested energy comes from. `automatic` follows the policy:
/// hybrid for heno-hybrid, solar only for the baselines.
enum class HarvesterMode { automatic, hybrid, solar };

/// Everything a run needs. Defaults reproduce the reference setup: 2 days,
/// 7 senders at 1 packet/s, 3000 mAh at 2.1 V starting at 25 %, T_w 5 ms,
/// 0.32 ms CSMA slot, 250 kbps.
struct SimConfig {
  double horizon = 172800.0;  // s
  int senders = 7;

  policy::PolicyConfig policy;
  HarvesterMode harvester = HarvesterMode::automatic;
  bool forecast_harvest = false;
  trace::HarvestConfig harvest;
  energy::RadioPowerProfile radio;
  BatteryConfig battery;
  BatteryConfig sender_battery{3000.0, 100.0};

  double traffic_rate = 1.0;  // packets/s per sender
  std::optional<protocol::Priority> fixed_priority;  // random quartile draw when empty

  double csma_p = 0.5;
  double csma_slot = 0.32e-3;  // s
  double t_w = 5e-3;           // s
  double data_rate = 250000.0; // bit/s
  std::size_t queue_capacity = 64;
  double e_s_threshold = 10.0;  // %, WB energy-state flag

  double harvest_tick = 60.0;     // s between harvest credits
  double sample_interval = 600.0; // s between energy trajectory samples

  std::vector<std::uint64_t> seeds{1};

  std::string trace_path;  // empty: synthetic trace
  SyntheticParams synthetic;
  bool partial_slots = false;

  /// Throws ConfigError naming the first invalid key.
  void validate() const;

  /// Whether the receiver banks wind energy under this configuration.
  [[nodiscard]] bool harvests_wind() const;
};

/// Parses `key = value` lines; `#` starts a comment. Absent keys keep their
/// defaults, unknown keys and out-of-range values throw ConfigError naming
/// the key. A relative `trace` path is resolved against `base_dir`.
SimConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Reads and parses a file; also checks that a referenced trace exists.
SimConfig load_config(const std::filesystem::path& path);

/// Canonical text form with every key spelled out. parse_config(echo) == config.
std::string config_echo(const SimConfig& config);

/// FNV-1a 64 of the text.
std::uint64_t fnv1a64(std::string_view text);

std::string to_string(HarvesterMode mode);

}  // namespace henosim
