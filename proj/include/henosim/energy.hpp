#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "henosim/trace.hpp"

namespace henosim::energy {

enum class RadioState : std::uint8_t { transmit = 0, receive = 1, sleep = 2 };

inline constexpr std::size_t kRadioStateCount = 3;

const char* to_string(RadioState state);

/// Per-state radio power draw. Receive also covers idle listening.
/// Defaults are CC2420-class figures at 2.1 V.
struct RadioPowerProfile {
  double transmit = 0.05742;  // W
  double receive = 0.062;     // W
  double sleep = 0.0014;      // W
  double voltage = 2.1;       // V

  void validate() const;
  [[nodiscard]] double power(RadioState state) const;
};

/// Battery capacity in joules: mAh * 3.6 * V.
double battery_capacity_joules(double capacity_mah, double voltage);

/// Neumaier-compensated running sum. Keeps long accumulations of small
/// increments accurate to a few ulp of the result.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double initial) : sum_(initial) {}

  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

struct AccountResult {
  bool depleted = false;
  double powered_for = 0.0;  // s of the requested duration the battery could supply
};

/// Remaining charge plus per-state consumption bookkeeping for one node.
/// Charge never leaves [0, e_max]: credits clamp at e_max (the excess is
/// recorded as overflow) and an overdraw stops at zero and marks the
/// ledger depleted.
class EnergyLedger {
 public:
  EnergyLedger(double e_max, double initial);

  AccountResult account_state_time(const RadioPowerProfile& profile, RadioState state,
                                   double duration);
  void credit_harvest(double e_h, double e_w);

  /// 100 * RE_current / E_max
  [[nodiscard]] double remaining_total_percent() const;

  [[nodiscard]] double re_current() const { return remaining_.value(); }
  [[nodiscard]] double e_max() const { return e_max_; }
  [[nodiscard]] double initial() const { return initial_; }
  [[nodiscard]] bool depleted() const { return depleted_; }

  [[nodiscard]] double consumed(RadioState state) const;
  [[nodiscard]] double time_in(RadioState state) const;
  /// Sum of the per-state consumption entries.
  [[nodiscard]] double total_consumed() const;
  /// Sum of P_i * t_i recomputed from the stored state times.
  [[nodiscard]] double consumed_from_state_times(const RadioPowerProfile& profile) const;
  [[nodiscard]] double total_credited() const { return credited_.value(); }
  [[nodiscard]] double clamp_overflow() const { return overflow_.value(); }

  /// initial + credited - overflow - consumed - remaining. Zero up to rounding.
  [[nodiscard]] double audit_residual() const;

 private:
  double e_max_;
  double initial_;
  CompensatedSum remaining_;
  std::array<CompensatedSum, kRadioStateCount> consumed_{};
  std::array<CompensatedSum, kRadioStateCount> time_{};
  CompensatedSum credited_;
  CompensatedSum overflow_;
  bool depleted_ = false;
};

/// ENO holds when the slot's harvest meets or exceeds e_c.
bool eno_achieved(const trace::SlotEnergy& slot, double e_c);

/// Integrates radio state over simulated time into a ledger.
class RadioMeter {
 public:
  RadioMeter(const RadioPowerProfile& profile, RadioState initial, double now)
      : profile_(&profile), state_(initial), since_(now) {}

  /// Accounts [since, now) in the current state. Returns the instant the
  /// battery ran dry if it did.
  std::optional<double> advance(EnergyLedger& ledger, double now);

  std::optional<double> switch_to(EnergyLedger& ledger, RadioState state, double now);

  /// Books a pre-computed duration in `state` without moving the clock.
  std::optional<double> charge(EnergyLedger& ledger, RadioState state, double duration);

  void reset_clock(double now) { since_ = now; }

  [[nodiscard]] RadioState state() const { return state_; }
  [[nodiscard]] double since() const { return since_; }

 private:
  const RadioPowerProfile* profile_;
  RadioState state_;
  double since_;
};

}  // namespace henosim::energy
