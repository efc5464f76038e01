#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "henosim/config.hpp"
#include "oracles.hpp"

namespace testing_support {

/// One sender, p = 1, d_c pinned to 1, a single fixed priority.
inline henosim::SimConfig single_sender_config(double horizon, henosim::protocol::Priority p) {
  henosim::SimConfig c;
  c.horizon = horizon;
  c.senders = 1;
  c.csma_p = 1.0;
  c.policy.kind = henosim::policy::PolicyKind::fixed;
  c.policy.fixed_d_c = 1.0;
  c.fixed_priority = p;
  return c;
}

/// The `gen` lines of an event log, in log order.
inline std::vector<oracle::Generation> generations(const std::string& log) {
  std::vector<oracle::Generation> out;
  std::istringstream in(log);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    double t = 0.0;
    std::string node;
    std::string kind;
    fields >> t >> node >> kind;
    if (kind == "gen") {
      oracle::Generation g;
      g.at = t;
      fields >> g.packet >> g.priority;
      out.push_back(g);
    }
  }
  return out;
}

}  // namespace testing_support
