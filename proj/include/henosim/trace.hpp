#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace henosim::trace {

/// One environmental measurement.
struct HarvestSample {
  double timestamp = 0.0;   // s since simulation epoch
  double irradiance = 0.0;  // W/m^2
  double wind_speed = 0.0;  // m/s

  friend bool operator==(const HarvestSample&, const HarvestSample&) = default;
};

using HarvestTrace = std::vector<HarvestSample>;

/// Solar panel and wind micro-turbine parameters. Defaults describe a
/// 7.7 cm^2 cell at 22 % efficiency and a 5 cm rotor.
struct HarvestConfig {
  double panel_area = 7.7e-4;      // m^2
  double panel_efficiency = 0.22;  // fraction
  double rotor_diameter = 0.05;    // m
  double air_density = 1.25;       // kg/m^3
  double power_coefficient = 0.1;  // fraction, below the Betz limit
  double slot_duration = 3600.0;   // s
  int slots_per_day = 24;

  /// Throws DomainError naming the first violated bound.
  void validate() const;

  /// Rotor swept area, pi * (d/2)^2.
  [[nodiscard]] double swept_area() const;
};

/// Energy harvested from each source during one slot.
struct SlotEnergy {
  std::size_t slot_index = 0;
  double solar_energy = 0.0;  // J
  double wind_energy = 0.0;   // J

  [[nodiscard]] double total() const { return solar_energy + wind_energy; }

  friend bool operator==(const SlotEnergy&, const SlotEnergy&) = default;
};

/// Reads `timestamp_s,irradiance_wm2,wind_speed_ms` CSV with one header row.
/// Blank lines are skipped. Throws ParseError (malformed row or
/// non-increasing timestamp), DomainError (negative physical value) or
/// EmptyInputError.
HarvestTrace parse_trace(std::istream& in);

/// Writes the canonical CSV form; values round-trip exactly through parse_trace.
void write_trace(std::ostream& out, const HarvestTrace& trace);

/// A * eta * I_s * d_s
double solar_slot_energy(double mean_irradiance, const HarvestConfig& cfg);

/// 0.5 * v^3 * A_w * rho * C_p * d_s
double wind_slot_energy(double mean_wind_speed, const HarvestConfig& cfg);

/// Time covered by the trace: each sample holds until the next one, the last
/// one for the final sample spacing. A single sample covers nothing.
double trace_end(const HarvestTrace& trace);

/// Splits the trace into consecutive slot_duration windows starting at the
/// first timestamp. The arithmetic mean of the samples inside each window is
/// fed to the solar and wind models (a window without samples holds the
/// previous sample). A trailing window the trace only partly covers is
/// dropped unless `allow_partial`.
std::vector<SlotEnergy> slot_aggregate(const HarvestTrace& trace, const HarvestConfig& cfg,
                                       bool allow_partial = false);

}  // namespace henosim::trace
