#include <sstream>

#include "doctest.h"
#include "henosim/errors.hpp"
#include "henosim/metrics.hpp"

using namespace henosim;
using namespace henosim::sim;
using protocol::Priority;

TEST_CASE("record_delay") {
  Metrics m;
  Recorder rec(m);
  rec.generated(10.0, 1, 1, Priority::P2);
  rec.record_delay(10.0, 10.004, 1, 1, Priority::P2);
  REQUIRE(m.delays[1].size() == 1);
  CHECK(m.delays[1][0] == doctest::Approx(0.004));
  CHECK(m.delivered == 1);
  CHECK_THROWS_AS(rec.record_delay(5.0, 4.0, 1, 2, Priority::P1), InvariantViolation);
}

TEST_CASE("summaries") {
  SUBCASE("mean of 2 and 4 ms") {
    Metrics m;
    m.delays[3] = {0.002, 0.004};
    m.generated = 3;
    m.delivered = 2;
    const auto s = summarize(m);
    CHECK(*s.mean_delay == doctest::Approx(0.003));
    CHECK(*s.mean_delay_by_priority[3] == *s.mean_delay);
    CHECK_FALSE(s.mean_delay_by_priority[0]);
    CHECK(s.pending == 1);
  }
  SUBCASE("no deliveries leaves delays absent") {
    Metrics m;
    m.generated = 5;
    const auto s = summarize(m);
    CHECK_FALSE(s.mean_delay);
    CHECK(s.delivery_ratio == 0.0);
  }
  SUBCASE("duty-cycle hours") {
    Metrics m;
    m.horizon = 7200.0;
    m.duty_cycle_trace = {{0.0, 1.0}, {1800.0, 0.5}, {3600.0, 1.0}};
    const auto s = summarize(m);
    CHECK(s.hours_at_full_duty == doctest::Approx(1.5));
    CHECK(s.mean_duty_cycle == doctest::Approx((1800.0 + 900.0 + 3600.0) / 7200.0));
  }
}

TEST_CASE("event log replay rebuilds metrics") {
  Metrics m;
  std::ostringstream log;
  Recorder rec(m, &log);
  rec.note(0.0, -1, "run", "heno-hybrid 1");
  rec.generated(0.1, 1, 1, Priority::P1);
  rec.generated(0.3, 2, 2, Priority::P4);
  rec.duty_cycle(0.0, 1.0);
  rec.energy_sample(0.0, 25.0);
  rec.note(0.31, 2, "tx", "TxB");
  rec.record_delay(0.3, 0.3021, 2, 2, Priority::P4);
  rec.collided(0.5, 1, 2);
  rec.dropped(0.7, 1, 1, Priority::P1);
  rec.duty_cycle(3600.0, 0.2222222222222222);
  rec.energy_sample(600.0, 24.987654321);
  rec.node_dead(7000.0, 0);
  rec.finish(7200.0, 0.0, 1.0, 1.5e-15);

  std::istringstream in(log.str());
  const auto back = replay_event_log(in);
  CHECK(back == m);
  CHECK(summarize(back) == summarize(m));
}
