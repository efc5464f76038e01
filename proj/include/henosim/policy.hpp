#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "henosim/trace.hpp"

namespace henosim::policy {

/// heno_hybrid is the ENO-based controller fed by solar and wind. The other
/// three are simplified comparison controllers:
///   solar_eno       - same tiers, wind ignored
///   solar_available - stored-energy tiers only, no ENO row, wind ignored
///   fixed           - constant duty cycle
enum class PolicyKind { heno_hybrid, solar_eno, solar_available, fixed };

std::string to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view name);

/// Solar-only kinds also harvest only solar energy.
bool uses_wind(PolicyKind kind);

struct PolicyConfig {
  double e_th = 10.0;        // %, stored-energy threshold
  double e_c = 224.0;        // J per slot at d_c = 1
  double t_listen = 0.1;     // s
  double d_c_floor = 0.05;
  double fixed_d_c = 0.5;    // used by PolicyKind::fixed
  PolicyKind kind = PolicyKind::heno_hybrid;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

struct DutyCycleDecision {
  double d_c = 1.0;
  double t_sleep = 0.0;  // s

  friend bool operator==(const DutyCycleDecision&, const DutyCycleDecision&) = default;
};

/// T_listen * (1 - d_c) / d_c. Throws DomainError for d_c outside (0, 1].
double sleep_time(double d_c, double t_listen);

/// Duty cycle from the stored-energy level alone:
///   RE >= 50 %        -> 1
///   E_th <= RE < 50 % -> (RE - E_th) / (100 - E_th), never below the floor
///   RE < E_th         -> floor
double stored_energy_duty_cycle(double re_total_pct, const PolicyConfig& cfg);

/// ENO first (harvest >= E_c -> 1), then the stored-energy tiers.
DutyCycleDecision heno_duty_cycle(const trace::SlotEnergy& slot, double re_total_pct,
                                  const PolicyConfig& cfg);

/// Throws ConfigError when `kind` is heno_hybrid.
DutyCycleDecision baseline_duty_cycle(PolicyKind kind, const trace::SlotEnergy& slot,
                                      double re_total_pct, const PolicyConfig& cfg);

/// Dispatches on cfg.kind.
DutyCycleDecision decide(const trace::SlotEnergy& slot, double re_total_pct,
                         const PolicyConfig& cfg);

/// The slot as seen by a controller of `kind` (wind zeroed for solar-only kinds).
trace::SlotEnergy visible_harvest(PolicyKind kind, const trace::SlotEnergy& slot);

}  // namespace henosim::policy
