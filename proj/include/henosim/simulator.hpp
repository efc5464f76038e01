#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>

#include "henosim/config.hpp"
#include "henosim/metrics.hpp"
#include "henosim/trace.hpp"

namespace henosim::sim {

/// Runs one star-network simulation to `config.horizon`.
///
/// `slots` is the per-slot harvest of the trace; it must cover the horizon
/// (ConfigError otherwise). Each node draws from its own RNG stream derived
/// from (seed, node id), so identical inputs give bit-identical Metrics and
/// event logs. Throws InvariantViolation if the channel or the energy audit
/// detects an inconsistency.
Metrics run(const SimConfig& config, std::span<const trace::SlotEnergy> slots, std::uint64_t seed,
            std::ostream* event_log = nullptr);

}  // namespace henosim::sim
