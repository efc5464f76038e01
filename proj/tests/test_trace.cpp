#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "henosim/errors.hpp"
#include "henosim/trace.hpp"

using namespace henosim;
using namespace henosim::trace;

namespace {

HarvestTrace parse(const std::string& text) {
  std::istringstream in(text);
  return parse_trace(in);
}

// Hand-written versions of the two harvest formulas.
double solar_ref(double irr) { return 7.7e-4 * 0.22 * irr * 3600.0; }
double wind_ref(double v) {
  const double r = 0.05 / 2.0;
  return 0.5 * v * v * v * (std::numbers::pi * r * r) * 1.25 * 0.1 * 3600.0;
}

}  // namespace

TEST_CASE("parse_trace accepts well-formed rows") {
  const auto one = parse("t,irr,wind\n0,0,0\n");
  REQUIRE(one.size() == 1);
  CHECK(one[0] == HarvestSample{0.0, 0.0, 0.0});

  const auto two = parse("t,irr,wind\n0,500,3\n3600,600,4\n");
  REQUIRE(two.size() == 2);
  CHECK(two[1] == HarvestSample{3600.0, 600.0, 4.0});

  const auto blanks = parse("\nt,irr,wind\n\n0,1,2\r\n\n");
  CHECK(blanks.size() == 1);
}

TEST_CASE("parse_trace rejects bad input") {
  CHECK_THROWS_AS(parse("t,irr,wind\n0,-5,3\n"), DomainError);
  CHECK_THROWS_AS(parse("t,irr,wind\n0,5,-3\n"), DomainError);
  CHECK_THROWS_AS(parse("t,irr,wind\n"), EmptyInputError);
  CHECK_THROWS_AS(parse(""), EmptyInputError);
  CHECK_THROWS_AS(parse("t,irr,wind\n0,1,2\n0,1,2\n"), ParseError);
  CHECK_THROWS_AS(parse("t,irr,wind\n10,1,2\n5,1,2\n"), ParseError);
  CHECK_THROWS_AS(parse("t,irr,wind\n0,1\n"), ParseError);
  CHECK_THROWS_AS(parse("t,irr,wind\n0,1,2,3\n"), ParseError);
  CHECK_THROWS_AS(parse("t,irr,wind\n0,abc,2\n"), ParseError);
  try {
    parse("t,irr,wind\n0,1,2\nx,1,2\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("write_trace round-trips exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1200.0);
  HarvestTrace trace;
  double t = 0.0;
  for (int i = 0; i < 500; ++i) {
    t += 0.001 + u(rng);
    trace.push_back({t, u(rng), u(rng) / 50.0});
  }
  std::stringstream buf;
  write_trace(buf, trace);
  CHECK(parse_trace(buf) == trace);
}

TEST_CASE("solar slot energy") {
  const HarvestConfig cfg;
  CHECK(solar_slot_energy(0.0, cfg) == 0.0);
  CHECK(solar_slot_energy(1000.0, cfg) == doctest::Approx(609.84).epsilon(1e-12));
  CHECK(solar_slot_energy(1000.0, cfg) == doctest::Approx(solar_ref(1000.0)).epsilon(1e-12));
  CHECK(solar_slot_energy(959.3, cfg) == doctest::Approx(585.0).epsilon(0.02));
  CHECK(solar_slot_energy(550.0, cfg) == doctest::Approx(335.412).epsilon(1e-9));
  CHECK_THROWS_AS(solar_slot_energy(-1.0, cfg), DomainError);
}

TEST_CASE("wind slot energy") {
  const HarvestConfig cfg;
  CHECK(wind_slot_energy(0.0, cfg) == 0.0);
  CHECK(wind_slot_energy(8.0, cfg) == doctest::Approx(wind_ref(8.0)).epsilon(1e-12));
  CHECK(wind_slot_energy(8.0, cfg) == doctest::Approx(226.2).epsilon(1e-3));
  CHECK(wind_slot_energy(2.0, cfg) == doctest::Approx(3.53).epsilon(2e-3));
  CHECK_THROWS_AS(wind_slot_energy(-0.1, cfg), DomainError);
}

TEST_CASE("harvest scaling properties") {
  const HarvestConfig cfg;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 30.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    CHECK(wind_slot_energy(2.0 * v, cfg) / wind_slot_energy(v, cfg) ==
          doctest::Approx(8.0).epsilon(1e-12));
    const double irr = 40.0 * u(rng);
    const double k = u(rng);
    CHECK(solar_slot_energy(k * irr, cfg) / solar_slot_energy(irr, cfg) ==
          doctest::Approx(k).epsilon(1e-12));
  }
}

TEST_CASE("HarvestConfig validation") {
  HarvestConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.swept_area() == doctest::Approx(std::numbers::pi * 0.025 * 0.025));
  cfg.power_coefficient = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.panel_efficiency = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.slot_duration = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("slot_aggregate") {
  const HarvestConfig cfg;

  SUBCASE("constant single slot") {
    const HarvestTrace trace{{0, 1000, 0}, {1800, 1000, 0}};
    const auto slots = slot_aggregate(trace, cfg);
    REQUIRE(slots.size() == 1);
    CHECK(slots[0].solar_energy == doctest::Approx(609.84).epsilon(1e-12));
    CHECK(slots[0].wind_energy == 0.0);
  }

  SUBCASE("window mean") {
    const HarvestTrace trace{{0, 500, 0}, {1800, 600, 0}};
    const auto slots = slot_aggregate(trace, cfg);
    REQUIRE(slots.size() == 1);
    CHECK(slots[0].solar_energy == doctest::Approx(solar_ref(550.0)).epsilon(1e-12));
  }

  SUBCASE("wind averaged before cubing") {
    const HarvestTrace trace{{0, 0, 2}, {1800, 0, 6}};
    const auto slots = slot_aggregate(trace, cfg);
    CHECK(slots[0].wind_energy == doctest::Approx(wind_ref(4.0)).epsilon(1e-12));
  }

  SUBCASE("two hourly samples give two slots") {
    const auto slots = slot_aggregate({{0, 500, 3}, {3600, 600, 4}}, cfg);
    REQUIRE(slots.size() == 2);
    CHECK(slots[0].slot_index == 0);
    CHECK(slots[1].slot_index == 1);
    CHECK(slots[1].solar_energy == doctest::Approx(solar_ref(600.0)));
  }

  SUBCASE("constant trace gives identical slots") {
    HarvestTrace trace;
    for (int i = 0; i < 48 * 6; ++i) {
      trace.push_back({600.0 * i, 321.0, 5.5});
    }
    const auto slots = slot_aggregate(trace, cfg);
    REQUIRE(slots.size() == 48);
    for (const auto& s : slots) {
      CHECK(s.solar_energy == slots[0].solar_energy);
      CHECK(s.wind_energy == slots[0].wind_energy);
    }
  }

  SUBCASE("gap holds the previous sample") {
    const auto slots = slot_aggregate({{0, 100, 1}, {7200, 0, 0}, {10800, 0, 0}}, cfg);
    REQUIRE(slots.size() == 4);
    CHECK(slots[1].solar_energy == doctest::Approx(solar_ref(100.0)));
  }

  SUBCASE("partial slots") {
    const HarvestTrace trace{{0, 100, 0}, {600, 100, 0}};
    CHECK_THROWS_AS(slot_aggregate(trace, cfg), DomainError);
    const auto slots = slot_aggregate(trace, cfg, true);
    CHECK(slots.size() == 1);
    const HarvestTrace longer{{0, 100, 0}, {2400, 100, 0}};
    CHECK(slot_aggregate(longer, cfg).size() == 1);
    CHECK(slot_aggregate(longer, cfg, true).size() == 2);
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(slot_aggregate({}, cfg), EmptyInputError);
    CHECK_THROWS_AS(slot_aggregate({{0, 1, 1}}, cfg), DomainError);
  }
}
