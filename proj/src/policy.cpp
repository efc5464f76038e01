#include "henosim/policy.hpp"

#include <algorithm>

#include "henosim/energy.hpp"
#include "henosim/errors.hpp"

namespace henosim::policy {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::heno_hybrid:
      return "heno-hybrid";
    case PolicyKind::solar_eno:
      return "solar-eno";
    case PolicyKind::solar_available:
      return "solar-available";
    case PolicyKind::fixed:
      return "fixed";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  for (auto kind : {PolicyKind::heno_hybrid, PolicyKind::solar_eno, PolicyKind::solar_available,
                    PolicyKind::fixed}) {
    if (name == to_string(kind)) {
      return kind;
    }
  }
  return std::nullopt;
}

bool uses_wind(PolicyKind kind) { return kind == PolicyKind::heno_hybrid; }

void PolicyConfig::validate() const {
  if (!(e_th > 0.0 && e_th < 100.0)) {
    throw ConfigError("e_th", "must be in (0, 100)");
  }
  if (!(e_c > 0.0)) {
    throw ConfigError("e_c", "must be > 0");
  }
  if (!(t_listen > 0.0)) {
    throw ConfigError("t_listen", "must be > 0");
  }
  if (!(d_c_floor > 0.0 && d_c_floor <= 1.0)) {
    throw ConfigError("d_c_floor", "must be in (0, 1]");
  }
  if (!(fixed_d_c > 0.0 && fixed_d_c <= 1.0)) {
    throw ConfigError("fixed_d_c", "must be in (0, 1]");
  }
}

double sleep_time(double d_c, double t_listen) {
  if (!(d_c > 0.0 && d_c <= 1.0)) {
    throw DomainError("duty cycle must be in (0, 1]");
  }
  if (!(t_listen > 0.0)) {
    throw DomainError("listen time must be > 0");
  }
  return t_listen * (1.0 - d_c) / d_c;
}

double stored_energy_duty_cycle(double re_total_pct, const PolicyConfig& cfg) {
  if (re_total_pct >= 50.0) {
    return 1.0;
  }
  if (re_total_pct >= cfg.e_th) {
    // Zero at exactly E_th, hence the floor.
    const double d_c = (re_total_pct - cfg.e_th) / (100.0 - cfg.e_th);
    return std::max(d_c, cfg.d_c_floor);
  }
  return cfg.d_c_floor;
}

namespace {

DutyCycleDecision make_decision(double d_c, const PolicyConfig& cfg) {
  return {d_c, sleep_time(d_c, cfg.t_listen)};
}

DutyCycleDecision eno_tiers(const trace::SlotEnergy& slot, double re_total_pct,
                            const PolicyConfig& cfg) {
  if (energy::eno_achieved(slot, cfg.e_c)) {
    return make_decision(1.0, cfg);
  }
  return make_decision(stored_energy_duty_cycle(re_total_pct, cfg), cfg);
}

}  // namespace

DutyCycleDecision heno_duty_cycle(const trace::SlotEnergy& slot, double re_total_pct,
                                  const PolicyConfig& cfg) {
  return eno_tiers(slot, re_total_pct, cfg);
}

DutyCycleDecision baseline_duty_cycle(PolicyKind kind, const trace::SlotEnergy& slot,
                                      double re_total_pct, const PolicyConfig& cfg) {
  switch (kind) {
    case PolicyKind::solar_eno:
      return eno_tiers(visible_harvest(kind, slot), re_total_pct, cfg);
    case PolicyKind::solar_available:
      return make_decision(stored_energy_duty_cycle(re_total_pct, cfg), cfg);
    case PolicyKind::fixed:
      return make_decision(cfg.fixed_d_c, cfg);
    case PolicyKind::heno_hybrid:
      break;
  }
  throw ConfigError("policy", "not a baseline policy: " + to_string(kind));
}

DutyCycleDecision decide(const trace::SlotEnergy& slot, double re_total_pct,
                         const PolicyConfig& cfg) {
  if (cfg.kind == PolicyKind::heno_hybrid) {
    return heno_duty_cycle(slot, re_total_pct, cfg);
  }
  return baseline_duty_cycle(cfg.kind, slot, re_total_pct, cfg);
}

trace::SlotEnergy visible_harvest(PolicyKind kind, const trace::SlotEnergy& slot) {
  auto seen = slot;
  if (!uses_wind(kind)) {
    seen.wind_energy = 0.0;
  }
  return seen;
}

}  // namespace henosim::policy
