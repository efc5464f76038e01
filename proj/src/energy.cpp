#include "henosim/energy.hpp"

#include <cmath>

#include "henosim/errors.hpp"

namespace henosim::energy {

const char* to_string(RadioState state) {
  switch (state) {
    case RadioState::transmit:
      return "transmit";
    case RadioState::receive:
      return "receive";
    case RadioState::sleep:
      return "sleep";
  }
  return "?";
}

void RadioPowerProfile::validate() const {
  if (!(transmit > 0.0 && receive > 0.0 && sleep > 0.0)) {
    throw DomainError("radio powers must be > 0");
  }
  if (!(transmit > sleep && receive > sleep)) {
    throw DomainError("transmit and receive power must exceed sleep power");
  }
  if (!(voltage > 0.0)) {
    throw DomainError("voltage must be > 0");
  }
}

double RadioPowerProfile::power(RadioState state) const {
  switch (state) {
    case RadioState::transmit:
      return transmit;
    case RadioState::receive:
      return receive;
    case RadioState::sleep:
      return sleep;
  }
  return 0.0;
}

double battery_capacity_joules(double capacity_mah, double voltage) {
  return capacity_mah * 3.6 * voltage;
}

EnergyLedger::EnergyLedger(double e_max, double initial)
    : e_max_(e_max), initial_(initial), remaining_(initial) {
  if (!(e_max > 0.0)) {
    throw DomainError("e_max must be > 0");
  }
  if (!(initial >= 0.0 && initial <= e_max)) {
    throw DomainError("initial charge must be within [0, e_max]");
  }
}

AccountResult EnergyLedger::account_state_time(const RadioPowerProfile& profile,
                                               RadioState state, double duration) {
  if (duration < 0.0) {
    throw DomainError("duration must be >= 0");
  }
  if (depleted_ || duration == 0.0) {
    return {depleted_, 0.0};
  }
  const auto idx = static_cast<std::size_t>(state);
  const double power = profile.power(state);
  const double demand = power * duration;
  const double available = re_current();

  if (demand <= available) {
    consumed_[idx].add(demand);
    time_[idx].add(duration);
    remaining_.add(-demand);
    return {false, duration};
  }

  // Runs dry part-way through: draw exactly what is left.
  const double powered_for = available / power;
  consumed_[idx].add(available);
  time_[idx].add(powered_for);
  remaining_ = CompensatedSum(0.0);
  depleted_ = true;
  return {true, powered_for};
}

void EnergyLedger::credit_harvest(double e_h, double e_w) {
  if (e_h < 0.0 || e_w < 0.0) {
    throw DomainError("harvested energy must be >= 0");
  }
  const double offered = e_h + e_w;
  if (offered == 0.0) {
    return;
  }
  credited_.add(offered);
  const double headroom = e_max_ - re_current();
  if (offered > headroom) {
    overflow_.add(offered - headroom);
    remaining_ = CompensatedSum(e_max_);
  } else {
    remaining_.add(offered);
  }
}

double EnergyLedger::remaining_total_percent() const { return 100.0 * re_current() / e_max_; }

double EnergyLedger::consumed(RadioState state) const {
  return consumed_[static_cast<std::size_t>(state)].value();
}

double EnergyLedger::time_in(RadioState state) const {
  return time_[static_cast<std::size_t>(state)].value();
}

double EnergyLedger::total_consumed() const {
  double total = 0.0;
  for (const auto& c : consumed_) {
    total += c.value();
  }
  return total;
}

double EnergyLedger::consumed_from_state_times(const RadioPowerProfile& profile) const {
  double total = 0.0;
  for (std::size_t i = 0; i < kRadioStateCount; ++i) {
    total += profile.power(static_cast<RadioState>(i)) * time_[i].value();
  }
  return total;
}

double EnergyLedger::audit_residual() const {
  CompensatedSum residual(initial_);
  residual.add(total_credited());
  residual.add(-clamp_overflow());
  for (const auto& c : consumed_) {
    residual.add(-c.value());
  }
  residual.add(-re_current());
  return residual.value();
}

bool eno_achieved(const trace::SlotEnergy& slot, double e_c) {
  if (!(e_c > 0.0)) {
    throw DomainError("e_c must be > 0");
  }
  return slot.solar_energy + slot.wind_energy >= e_c;
}

std::optional<double> RadioMeter::advance(EnergyLedger& ledger, double now) {
  const double start = since_;
  if (now <= start) {
    return std::nullopt;
  }
  since_ = now;
  const auto result = ledger.account_state_time(*profile_, state_, now - start);
  if (result.depleted) {
    return start + result.powered_for;
  }
  return std::nullopt;
}

std::optional<double> RadioMeter::switch_to(EnergyLedger& ledger, RadioState state, double now) {
  auto died = advance(ledger, now);
  state_ = state;
  return died;
}

std::optional<double> RadioMeter::charge(EnergyLedger& ledger, RadioState state, double duration) {
  const auto result = ledger.account_state_time(*profile_, state, duration);
  if (result.depleted) {
    return since_ + result.powered_for;
  }
  return std::nullopt;
}

}  // namespace henosim::energy
