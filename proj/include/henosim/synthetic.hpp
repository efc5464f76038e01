#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "henosim/trace.hpp"

namespace henosim {

enum class SyntheticKind { sinusoidal_solar, gusty_wind, combined, flat };

std::string to_string(SyntheticKind kind);
std::optional<SyntheticKind> parse_synthetic_kind(std::string_view name);

/// Desk-scale stand-in for measured irradiance and wind data. The day starts
/// at t = 0 (midnight).
///
/// Solar: half sine between sunrise and sunset, zero at night.
/// Wind: base speed (night or day) plus a non-negative gust term
/// gust * |N(0, 1)|, so the base is a floor.
/// Flat: constant flat_irradiance and flat_wind.
struct SyntheticParams {
  SyntheticKind kind = SyntheticKind::combined;
  double hours = 48.0;
  double sample_period = 600.0;      // s
  double peak_irradiance = 959.3;    // W/m^2
  double sunrise_hour = 6.0;
  double sunset_hour = 21.0;
  double night_wind = 8.0;           // m/s
  double day_wind = 6.0;             // m/s
  double gust = 0.05;                // m/s
  double flat_irradiance = 0.0;
  double flat_wind = 0.0;
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the offending parameter.
  void validate() const;

  friend bool operator==(const SyntheticParams&, const SyntheticParams&) = default;
};

trace::HarvestTrace generate_synthetic_trace(const SyntheticParams& params);

}  // namespace henosim
