#include "henosim/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "henosim/errors.hpp"

namespace henosim {

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::sinusoidal_solar:
      return "sinusoidal-solar";
    case SyntheticKind::gusty_wind:
      return "gusty-wind";
    case SyntheticKind::combined:
      return "combined";
    case SyntheticKind::flat:
      return "flat";
  }
  return "?";
}

std::optional<SyntheticKind> parse_synthetic_kind(std::string_view name) {
  for (auto kind : {SyntheticKind::sinusoidal_solar, SyntheticKind::gusty_wind,
                    SyntheticKind::combined, SyntheticKind::flat}) {
    if (name == to_string(kind)) {
      return kind;
    }
  }
  return std::nullopt;
}

void SyntheticParams::validate() const {
  if (!(hours > 0.0)) {
    throw ConfigError("hours", "must be > 0");
  }
  if (!(sample_period > 0.0)) {
    throw ConfigError("sample_period", "must be > 0");
  }
  if (!(peak_irradiance >= 0.0)) {
    throw ConfigError("peak_irradiance", "must be >= 0");
  }
  if (!(sunrise_hour >= 0.0 && sunrise_hour < sunset_hour && sunset_hour <= 24.0)) {
    throw ConfigError("sunrise_hour", "need 0 <= sunrise_hour < sunset_hour <= 24");
  }
  if (!(night_wind >= 0.0)) {
    throw ConfigError("night_wind", "must be >= 0");
  }
  if (!(day_wind >= 0.0)) {
    throw ConfigError("day_wind", "must be >= 0");
  }
  if (!(gust >= 0.0)) {
    throw ConfigError("gust", "must be >= 0");
  }
  if (!(flat_irradiance >= 0.0)) {
    throw ConfigError("flat_irradiance", "must be >= 0");
  }
  if (!(flat_wind >= 0.0)) {
    throw ConfigError("flat_wind", "must be >= 0");
  }
}

trace::HarvestTrace generate_synthetic_trace(const SyntheticParams& params) {
  params.validate();

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> gust_noise(0.0, 1.0);

  const bool solar = params.kind == SyntheticKind::sinusoidal_solar ||
                     params.kind == SyntheticKind::combined;
  const bool wind = params.kind == SyntheticKind::gusty_wind ||
                    params.kind == SyntheticKind::combined;

  const double duration = params.hours * 3600.0;
  const auto count = static_cast<std::size_t>(std::ceil(duration / params.sample_period));
  trace::HarvestTrace out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) * params.sample_period;
    trace::HarvestSample s{t, 0.0, 0.0};
    if (params.kind == SyntheticKind::flat) {
      s.irradiance = params.flat_irradiance;
      s.wind_speed = params.flat_wind;
      out.push_back(s);
      continue;
    }
    const double hour = std::fmod(t, 86400.0) / 3600.0;
    const bool daylight = hour > params.sunrise_hour && hour < params.sunset_hour;
    if (solar && daylight) {
      const double phase =
          (hour - params.sunrise_hour) / (params.sunset_hour - params.sunrise_hour);
      s.irradiance = params.peak_irradiance * std::sin(std::numbers::pi * phase);
    }
    if (wind) {
      const double base = daylight ? params.day_wind : params.night_wind;
      s.wind_speed = base + params.gust * std::abs(gust_noise(rng));
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace henosim
