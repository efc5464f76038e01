#include <algorithm>

#include "doctest.h"
#include "henosim/errors.hpp"
#include "henosim/mac.hpp"
#include "oracles.hpp"
#include "receiver_harness.hpp"

using namespace henosim;
using namespace henosim::protocol;


TEST_CASE("receiver matches the brute-force round model") {
  const double t_w = MacTiming{}.t_w;
  const std::vector<double> grid{0.3e-3, 0.8e-3, 1.6e-3, 2.5e-3, 3.1e-3, 4.4e-3, 4.95e-3};
  std::size_t cases = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    for (const auto& prios : oracle::priority_vectors(n)) {
      for (const auto& times : oracle::arrangements(grid, n)) {
        std::vector<oracle::Arrival> arrivals;
        for (std::size_t i = 0; i < n; ++i) {
          arrivals.push_back({static_cast<NodeId>(i + 1), prios[i], times[i]});
        }
        const auto want = oracle::collection_round(arrivals, t_w);
        const auto got = testing_support::drive(arrivals, 0.0);
        REQUIRE(got.winner == want.winner);
        REQUIRE(got.accepted == want.accepted);
        REQUIRE_FALSE(got.late_accept);
        REQUIRE(got.decided_at == doctest::Approx(want.decided_at).epsilon(1e-12));
        REQUIRE_FALSE(got.deadline_grew);
        const bool has_p4 = std::any_of(arrivals.begin(), arrivals.end(), [&](const auto& a) {
          return a.priority == 4 &&
                 std::find(got.accepted.begin(), got.accepted.end(), a.sender) !=
                     got.accepted.end();
        });
        if (has_p4) {
          const auto& w = arrivals[*got.winner - 1];
          REQUIRE(w.priority == 4);
          REQUIRE(got.decided_at == w.at);
        }
        ++cases;
      }
    }
  }
  CHECK(cases == 4 * 7 + 16 * 42 + 64 * 210);
}

TEST_CASE("receiver examples") {
  SUBCASE("P4 cancels the wait") {
    const auto obs = testing_support::drive({{5, 4, 1e-3}}, 0.0);
    CHECK(obs.winner == NodeId{5});
    CHECK(obs.decided_at == 1e-3);
  }
  SUBCASE("P2 then P3 selects P3") {
    CHECK(testing_support::drive({{1, 2, 0.5e-3}, {2, 3, 1e-3}}, 0.0).winner == NodeId{2});
    CHECK(testing_support::drive({{1, 3, 0.5e-3}, {2, 2, 1e-3}}, 0.0).winner == NodeId{1});
  }
  SUBCASE("earliest of equal priorities") {
    CHECK(testing_support::drive({{1, 3, 1e-3}, {2, 3, 1.2e-3}}, 0.0).winner == NodeId{1});
    CHECK(testing_support::drive({{1, 3, 1.2e-3}, {2, 3, 1e-3}}, 0.0).winner == NodeId{2});
  }
  SUBCASE("empty round") {
    const auto obs = testing_support::drive({}, 0.0);
    CHECK_FALSE(obs.winner);
    CHECK(obs.decided_at == doctest::Approx(5e-3));
  }
}

TEST_CASE("receiver WB energy flag and phases") {
  Receiver rx(0, MacTiming{}, 10.0);
  CHECK_THROWS_AS(rx.start_round(0.0, 50.0), InvariantViolation);
  rx.begin_window(0.0, 0.1);
  CHECK(rx.window_open(0.05));
  CHECK_FALSE(rx.window_open(0.1));
  CHECK(rx.start_round(0.0, 40.0).energy_ok);
  rx.on_wb_sent(0.000288);
  CHECK(rx.on_tw_expiry(rx.tw_deadline()) == std::nullopt);
  CHECK(rx.phase() == ReceiverPhase::listening);
  CHECK_FALSE(rx.start_round(0.01, 5.0).energy_ok);
  CHECK_THROWS_AS(rx.on_rxb_sent(0.02), InvariantViolation);
}

TEST_CASE("receiver ignores TxBs for other addresses or after the deadline") {
  Receiver rx(0, MacTiming{}, 10.0);
  rx.begin_window(0.0, 0.1);
  rx.start_round(0.0, 50.0);
  const double deadline = rx.on_wb_sent(0.001);
  CHECK(rx.on_txb(TxBeacon{1, 7, Priority::P4}, 0.002).kind == TxbOutcome::Kind::ignored);
  CHECK(rx.on_txb(TxBeacon{1, 0, Priority::P4}, deadline).kind == TxbOutcome::Kind::ignored);
}

TEST_CASE("full handshake between a sender and the receiver") {
  const MacTiming timing;
  Receiver rx(0, timing, 10.0);
  Sender tx(1, 4, timing);
  CHECK(tx.phase() == SenderPhase::sleeping);
  tx.enqueue({42, 1, Priority::P4, 0.0});
  CHECK(tx.phase() == SenderPhase::awaiting_wb);

  rx.begin_window(0.0, 0.1);
  const auto wb = rx.start_round(0.0, 50.0);
  const double wb_end = timing.airtime(FrameKind::wb);
  rx.on_wb_sent(wb_end);
  REQUIRE(tx.on_wb(wb, wb_end));
  const double t1 = wb_end + timing.csma_slot;
  const auto txb = tx.start_txb(t1);
  CHECK(txb.priority == Priority::P4);
  const double t2 = t1 + timing.airtime(FrameKind::txb);
  tx.on_txb_sent(t2);
  const auto out = rx.on_txb(txb, t2);
  REQUIRE(out.kind == TxbOutcome::Kind::select_now);
  const double t3 = t2 + timing.airtime(FrameKind::rxb);
  rx.on_rxb_sent(t3);
  const auto data = tx.on_rxb(*out.rxb, t3);
  REQUIRE(data);
  CHECK(data->packet_id == 42);
  const double t4 = t3 + timing.airtime(FrameKind::data);
  tx.on_data_sent(t4);
  const auto ack = rx.on_data(*data, t4);
  REQUIRE(ack);
  const auto delivered = tx.on_ack(*ack, t4 + timing.airtime(FrameKind::ack));
  REQUIRE(delivered);
  CHECK(delivered->id == 42);
  CHECK(tx.queue().empty());
  CHECK_FALSE(tx.has_work());
  CHECK(tx.phase() == SenderPhase::sleeping);
  CHECK_FALSE(tx.on_ack(*ack, 1.0));
}

TEST_CASE("sender gates") {
  const MacTiming timing;
  Sender tx(2, 4, timing);
  CHECK_FALSE(tx.on_wb(WakeupBeacon{0, true}, 0.0));
  tx.enqueue({1, 2, Priority::P1, 0.0});
  CHECK_FALSE(tx.on_wb(WakeupBeacon{0, false}, 0.0));
  CHECK(tx.phase() == SenderPhase::awaiting_wb);
  CHECK_THROWS_AS(tx.start_txb(0.001), InvariantViolation);

  SUBCASE("not selected keeps the packet") {
    REQUIRE(tx.on_wb(WakeupBeacon{0, true}, 1.0));
    tx.start_txb(1.0003);
    tx.on_txb_sent(1.0008);
    CHECK_FALSE(tx.on_rxb(RxBeacon{0, 9}, 1.002));
    CHECK(tx.queue().size() == 1);
    CHECK(tx.phase() == SenderPhase::awaiting_wb);
  }
  SUBCASE("data is only sent when named") {
    REQUIRE(tx.on_wb(WakeupBeacon{0, true}, 1.0));
    CHECK_FALSE(tx.on_rxb(RxBeacon{0, 2}, 1.0001));
  }
  SUBCASE("ACK timeout retains the packet at the head") {
    tx.enqueue({2, 2, Priority::P1, 0.5});
    REQUIRE(tx.on_wb(WakeupBeacon{0, true}, 1.0));
    tx.start_txb(1.0003);
    tx.on_txb_sent(1.0008);
    REQUIRE(tx.on_rxb(RxBeacon{0, 2}, 1.0012));
    tx.on_data_sent(1.002);
    tx.on_ack_timeout(1.01);
    CHECK(tx.queue().size() == 2);
    CHECK(tx.queue().front()->id == 1);
  }
  SUBCASE("RxB timeout") {
    REQUIRE(tx.on_wb(WakeupBeacon{0, true}, 1.0));
    tx.start_txb(1.0003);
    const double deadline = tx.on_txb_sent(1.0008);
    CHECK(deadline == doctest::Approx(1.0 + 5e-3 + 2 * 416e-6 + 0.32e-3));
    tx.on_rxb_timeout(deadline);
    CHECK(tx.queue().size() == 1);
  }
}

TEST_CASE("timeouts are two airtimes plus a slot") {
  const MacTiming t;
  CHECK(t.reply_timeout(FrameKind::ack) == doctest::Approx(2 * 352e-6 + 0.32e-3));
  CHECK(select_txb({}) == std::nullopt);
}
