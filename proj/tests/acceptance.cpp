// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "henosim/errors.hpp"
#include "henosim/experiment.hpp"
#include "henosim/frame.hpp"
#include "henosim/mac.hpp"
#include "henosim/policy.hpp"
#include "henosim/simulator.hpp"
#include "henosim/trace.hpp"
#include "oracles.hpp"
#include "receiver_harness.hpp"
#include "sim_helpers.hpp"

using namespace henosim;
using policy::PolicyKind;
using protocol::FrameKind;
using protocol::Priority;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int number, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.pass) {
    ++failures;
  }
  fmt::print("{} criterion {}: {} ({:.3f} s) {}\n", out.pass ? "PASS" : "FAIL", number, title,
             secs, out.detail);
  std::fflush(stdout);
}

bool rel_close(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::abs(want);
}

// ---------------------------------------------------------------- 1

Outcome equations() {
  const trace::HarvestConfig cfg;
  Outcome out;
  std::vector<std::string> bad;
  const double solar = trace::solar_slot_energy(1000.0, cfg);
  if (!rel_close(solar, 609.84, 1e-9)) bad.push_back(fmt::format("solar(1000)={}", solar));
  // 0.5 * 8^3 * pi * 0.025^2 * 1.25 * 0.1 * 3600, by hand
  const double wind_hand = 0.5 * 512.0 * 3.141592653589793 * 0.000625 * 1.25 * 0.1 * 3600.0;
  const double wind = trace::wind_slot_energy(8.0, cfg);
  if (!rel_close(wind, wind_hand, 1e-9)) bad.push_back(fmt::format("wind(8)={}", wind));
  if (std::round(wind * 10.0) / 10.0 != 226.2) bad.push_back("wind(8) does not round to 226.2");
  const double solar_peak = trace::solar_slot_energy(959.3, cfg);
  if (!rel_close(solar_peak, 585.0, 0.02)) bad.push_back(fmt::format("solar(959.3)={}", solar_peak));
  const double wind_peak = trace::wind_slot_energy(8.0, cfg);
  if (!rel_close(wind_peak, 225.0, 0.02)) bad.push_back(fmt::format("wind(8) vs 225: {}", wind_peak));
  out.pass = bad.empty();
  out.detail = out.pass ? fmt::format("solar(1000)={:.6f} J wind(8)={:.6f} J peaks {:.1f}/{:.1f} J",
                                      solar, wind, solar_peak, wind_peak)
                        : fmt::format("{}", fmt::join(bad, "; "));
  return out;
}

// ---------------------------------------------------------------- 2

double table_row(double harvest, double re) {
  if (harvest >= 224.0) return 1.0;
  if (re >= 50.0) return 1.0;
  if (re >= 10.0) return std::max((re - 10.0) / 90.0, 0.05);
  return 0.05;
}

Outcome duty_table() {
  const policy::PolicyConfig cfg;
  int checked = 0;
  std::vector<std::string> bad;
  for (const double re : {0.1, 5.0, 10.0, 30.0, 49.99, 50.0, 75.0, 100.0}) {
    for (const double e : {0.0, 223.9, 224.0, 724.0}) {
      const auto d = policy::heno_duty_cycle({0, e, 0.0}, re, cfg);
      const double want = table_row(e, re);
      if (d.d_c != want) bad.push_back(fmt::format("RE={} E={}: d_c={} want {}", re, e, d.d_c, want));
      if (d.d_c * (cfg.t_listen + d.t_sleep) != cfg.t_listen) {
        bad.push_back(fmt::format("closure RE={} E={}", re, e));
      }
      ++checked;
    }
  }
  if (policy::heno_duty_cycle({0, 0.0, 0.0}, 10.0, cfg).d_c != 0.05) bad.push_back("10% clamp");
  return {bad.empty(), bad.empty() ? fmt::format("{} cells exact", checked)
                                   : fmt::format("{}", fmt::join(bad, "; "))};
}

// ---------------------------------------------------------------- 3

Outcome frames() {
  std::vector<std::string> bad;
  const std::pair<protocol::Frame, std::size_t> sizes[] = {
      {protocol::WakeupBeacon{1, true}, 9},          {protocol::TxBeacon{1, 0, Priority::P4}, 14},
      {protocol::RxBeacon{0, 1}, 13},                {protocol::Ack{0, 1, 2}, 11},
      {protocol::DataFrame{1, 0, Priority::P1, 2, 3}, 28}};
  for (const auto& [f, n] : sizes) {
    if (protocol::encode_frame(f).size != n) bad.push_back(fmt::format("size {}", n));
  }
  const std::pair<FrameKind, double> air[] = {{FrameKind::wb, 288e-6},   {FrameKind::txb, 448e-6},
                                              {FrameKind::rxb, 416e-6},  {FrameKind::ack, 352e-6},
                                              {FrameKind::data, 896e-6}};
  for (const auto& [k, t] : air) {
    if (!rel_close(protocol::frame_airtime(k, 250000.0), t, 1e-12)) {
      bad.push_back(fmt::format("airtime {}", protocol::to_string(k)));
    }
  }
  std::mt19937_64 rng(2024);
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto pick = rng() % 5;
    const auto id = static_cast<protocol::NodeId>(rng());
    const auto id2 = static_cast<protocol::NodeId>(rng());
    const auto prio = static_cast<Priority>(1 + rng() % 4);
    protocol::Frame f;
    switch (pick) {
      case 0: f = protocol::WakeupBeacon{id, (rng() & 1) != 0}; break;
      case 1: f = protocol::TxBeacon{id, id2, prio}; break;
      case 2: f = protocol::RxBeacon{id, id2}; break;
      case 3: f = protocol::Ack{id, id2, static_cast<std::uint16_t>(rng())}; break;
      default:
        f = protocol::DataFrame{id, id2, prio, static_cast<std::uint16_t>(rng()),
                                static_cast<std::uint32_t>(rng())};
    }
    const auto enc = protocol::encode_frame(f);
    if (!(protocol::decode_frame(enc.view()) == f)) {
      bad.push_back(fmt::format("round trip #{}", i));
      break;
    }
  }
  return {bad.empty(), bad.empty() ? fmt::format("sizes, airtimes, {} random round trips", n)
                                   : fmt::format("{}", fmt::join(bad, "; "))};
}

// ---------------------------------------------------------------- 4

Outcome protocol_oracle() {
  const double t_w = protocol::MacTiming{}.t_w;
  const std::vector<double> grid{0.3e-3, 0.8e-3, 1.6e-3, 2.5e-3, 3.1e-3, 4.4e-3, 4.95e-3};
  std::size_t cases = 0;
  std::size_t p4_cases = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    for (const auto& prios : oracle::priority_vectors(n)) {
      for (const auto& times : oracle::arrangements(grid, n)) {
        std::vector<oracle::Arrival> arrivals;
        for (std::size_t i = 0; i < n; ++i) {
          arrivals.push_back({static_cast<protocol::NodeId>(i + 1), prios[i], times[i]});
        }
        const auto want = oracle::collection_round(arrivals, t_w);
        const auto got = testing_support::drive(arrivals, 0.0);
        ++cases;
        const auto where = [&] { return fmt::format("case {} prios {}", cases, fmt::join(prios, ",")); };
        if (got.winner != want.winner || got.accepted != want.accepted ||
            std::abs(got.decided_at - want.decided_at) > 1e-15 || got.deadline_grew ||
            got.late_accept) {
          return {false, "mismatch at " + where()};
        }
        for (const auto& a : arrivals) {
          const bool accepted =
              std::find(got.accepted.begin(), got.accepted.end(), a.sender) != got.accepted.end();
          if (a.priority == 4 && accepted) {
            ++p4_cases;
            const auto& w = arrivals[*got.winner - 1];
            if (w.priority != 4 || got.decided_at > a.at) {
              return {false, "P4 did not end the wait at " + where()};
            }
            break;
          }
        }
      }
    }
  }
  return {true, fmt::format("{} enumerated rounds, {} with an accepted P4", cases, p4_cases)};
}

// ---------------------------------------------------------------- 5

Outcome single_sender() {
  const auto c = testing_support::single_sender_config(600.0, Priority::P4);
  std::ostringstream log;
  const auto start = std::chrono::steady_clock::now();
  const auto m = sim::run(c, build_slots(c), 5, &log);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (m.collided != 0 || m.dropped != 0) {
    return {false, "losses in a single-sender run"};
  }
  const auto gens = testing_support::generations(log.str());
  const protocol::MacTiming timing;
  const auto want = oracle::single_sender_delays(gens, c.horizon, timing);
  const auto& got = m.delays[protocol::index_of(Priority::P4)];
  if (got.size() != want.size() || want.empty()) {
    return {false, fmt::format("delivered {} vs oracle {}", got.size(), want.size())};
  }
  const double mean_got = std::accumulate(got.begin(), got.end(), 0.0) / got.size();
  const double mean_want = std::accumulate(want.begin(), want.end(), 0.0) / want.size();
  // Expected value over a uniform generation phase: half an idle round
  // of waiting plus the handshake.
  const double round = timing.airtime(FrameKind::wb) + timing.t_w;
  const double handshake = timing.csma_slot + timing.airtime(FrameKind::txb) +
                           timing.airtime(FrameKind::rxb) + timing.airtime(FrameKind::data);
  const double expected = round / 2.0 + handshake;
  const bool ok = rel_close(mean_got, mean_want, 1e-6) && secs < 1.0;
  return {ok, fmt::format("mean {:.9f} s vs oracle {:.9f} s (rel {:.2e}), {} packets, "
                          "phase-averaged {:.6f} s, sim {:.3f} s",
                          mean_got, mean_want, std::abs(mean_got - mean_want) / mean_want,
                          got.size(), expected, secs)};
}

// ---------------------------------------------------------------- 6 and 8

SimConfig trend_config() {
  SimConfig c;  // 2 days, 7 senders, 25 % start, combined synthetic trace
  std::vector<std::uint64_t> seeds(20);
  std::iota(seeds.begin(), seeds.end(), 1);
  c.seeds = seeds;
  return c;
}

double batch_seconds = 0.0;

const RunReport& trend_report() {
  static const RunReport report = [] {
    ExperimentOptions opt;
    opt.policies = {PolicyKind::heno_hybrid, PolicyKind::solar_eno, PolicyKind::solar_available,
                    PolicyKind::fixed};
    const auto start = std::chrono::steady_clock::now();
    auto r = run_experiment(trend_config(), opt);
    batch_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }();
  return report;
}

Outcome energy_audit() {
  const auto& report = trend_report();
  double worst = 0.0;
  std::size_t failed = 0;
  for (const auto& run : report.runs) {
    if (run.error) {
      ++failed;
    }
    worst = std::max(worst, run.metrics.energy_audit_error);
  }
  // A zero-harvest run that ends in receiver death.
  SimConfig dead;
  dead.horizon = 6.0 * 3600.0;
  dead.battery.initial_pct = 1.0;
  dead.synthetic.kind = SyntheticKind::flat;
  dead.policy.kind = PolicyKind::fixed;
  dead.policy.fixed_d_c = 1.0;
  const auto m = sim::run(dead, build_slots(dead), 1);
  worst = std::max(worst, m.energy_audit_error);
  const bool ok = failed == 0 && worst <= 1e-9 && m.receiver_death.has_value();
  return {ok, fmt::format("{} runs, {} aborted, worst relative residual {:.3e}, "
                          "delivery overlap checked on every DATA",
                          report.runs.size() + 1, failed, worst)};
}

// ---------------------------------------------------------------- 7

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  SimConfig c;
  c.horizon = 3600.0;
  c.seeds = {4, 9};
  const auto base = std::filesystem::temp_directory_path() / "henosim_acceptance_det";
  std::filesystem::remove_all(base);
  for (const char* which : {"a", "b"}) {
    ExperimentOptions opt;
    opt.policies = {PolicyKind::heno_hybrid, PolicyKind::solar_eno};
    opt.event_log_dir = base / which;
    write_report(run_experiment(c, opt), base / which);
  }
  std::size_t files = 0;
  std::uintmax_t bytes = 0;
  for (const auto& entry : std::filesystem::directory_iterator(base / "a")) {
    const auto other = base / "b" / entry.path().filename();
    if (!std::filesystem::exists(other) || slurp(entry.path()) != slurp(other)) {
      return {false, "differs: " + entry.path().filename().string()};
    }
    ++files;
    bytes += entry.file_size();
  }
  std::size_t files_b = 0;
  for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(base / "b")) {
    ++files_b;
  }
  std::filesystem::remove_all(base);
  return {files == files_b && files > 0,
          fmt::format("{} files ({} bytes) byte-identical across two invocations", files, bytes)};
}

// ---------------------------------------------------------------- 8

Outcome trend() {
  const auto& report = trend_report();
  const auto find = [&](PolicyKind k, std::uint64_t seed) -> const RunRecord& {
    for (const auto& r : report.runs) {
      if (r.policy == k && r.seed == seed) return r;
    }
    throw std::runtime_error("missing run");
  };
  const auto& seeds = trend_config().seeds;
  const PolicyKind baselines[] = {PolicyKind::solar_eno, PolicyKind::solar_available,
                                  PolicyKind::fixed};
  std::vector<std::string> notes;
  bool ok = true;

  for (const auto b : baselines) {
    std::size_t wins_all = 0;
    std::size_t wins_p4 = 0;
    for (const auto seed : seeds) {
      const auto& h = find(PolicyKind::heno_hybrid, seed).summary;
      const auto& o = find(b, seed).summary;
      if (h.mean_delay && o.mean_delay && *h.mean_delay < *o.mean_delay) ++wins_all;
      const auto& hp = h.mean_delay_by_priority[3];
      const auto& op = o.mean_delay_by_priority[3];
      if (hp && op && *hp < *op) ++wins_p4;
    }
    const bool pass = wins_all * 10 >= seeds.size() * 9 && wins_p4 * 10 >= seeds.size() * 9;
    ok = ok && pass;
    notes.push_back(fmt::format("(a) vs {}: all {}/{} P4 {}/{}", policy::to_string(b), wins_all,
                                seeds.size(), wins_p4, seeds.size()));
  }

  std::size_t re_wins = 0;
  for (const auto seed : seeds) {
    const double h = find(PolicyKind::heno_hybrid, seed).summary.final_re_pct;
    bool all = true;
    for (const auto b : baselines) {
      all = all && h > find(b, seed).summary.final_re_pct;
    }
    if (all) ++re_wins;
  }
  ok = ok && re_wins == seeds.size();
  notes.push_back(fmt::format("(b) final RE above every solar-only baseline {}/{}", re_wins,
                              seeds.size()));

  std::size_t full_wins = 0;
  double h_full = 0.0;
  double s_full = 0.0;
  for (const auto seed : seeds) {
    const double h = find(PolicyKind::heno_hybrid, seed).summary.hours_at_full_duty;
    const double s = find(PolicyKind::solar_eno, seed).summary.hours_at_full_duty;
    h_full += h;
    s_full += s;
    if (h > s) ++full_wins;
  }
  ok = ok && full_wins == seeds.size();
  notes.push_back(fmt::format("(c) hours at d_c=1 {:.2f} vs {:.2f}, {}/{} seeds",
                              h_full / seeds.size(), s_full / seeds.size(), full_wins,
                              seeds.size()));
  for (const auto& c : report.comparisons) {
    notes.push_back(fmt::format("improvement vs {} {:.1f}% (P4 {:.1f}%)",
                                policy::to_string(c.baseline), c.improvement_pct.value_or(NAN),
                                c.p4_improvement_pct.value_or(NAN)));
  }
  notes.push_back(fmt::format("batch wall time {:.1f} s on {} hardware thread(s)", batch_seconds,
                              std::max(1U, std::thread::hardware_concurrency())));
  return {ok, fmt::format("{}", fmt::join(notes, "; "))};
}

// ---------------------------------------------------------------- 9

Outcome depletion() {
  SimConfig c;
  c.horizon = 6.0 * 86400.0;
  c.battery.initial_pct = 5.0;
  c.synthetic.kind = SyntheticKind::flat;
  c.synthetic.flat_irradiance = 0.0;
  c.synthetic.flat_wind = 0.0;
  const auto slots = build_slots(c);

  const auto heno = sim::run(c, slots, 1);
  auto control = c;
  control.policy.kind = PolicyKind::fixed;
  control.policy.fixed_d_c = 1.0;
  const auto forced = sim::run(control, slots, 1);

  bool held = true;
  for (const auto& tv : heno.duty_cycle_trace) {
    if (tv.value != 0.05 && !(tv.value == 0.0 && heno.receiver_death && tv.time == *heno.receiver_death)) {
      held = false;
    }
  }
  if (!forced.receiver_death) {
    return {false, "control run never depleted"};
  }
  const double heno_h = heno.receiver_death.value_or(c.horizon) / 3600.0;
  const double forced_h = *forced.receiver_death / 3600.0;
  return {held && heno_h > forced_h,
          fmt::format("d_c held at 0.05: {}; node dead after {:.2f} h{} vs {:.2f} h at d_c=1",
                      held ? "yes" : "no", heno_h, heno.receiver_death ? "" : " (alive at horizon)",
                      forced_h)};
}

}  // namespace

int main() {
  report(1, "harvest equations", equations);
  report(2, "duty-cycle table", duty_table);
  report(3, "frames", frames);
  report(4, "protocol oracle", protocol_oracle);
  report(5, "single-sender closed form", single_sender);
  report(6, "energy audit", energy_audit);
  report(7, "determinism", determinism);
  report(8, "trend batch (20 seeds x 4 policies, 2 days)", trend);
  report(9, "depletion floor", depletion);
  fmt::print("batch means over {} seeds:\n", trend_config().seeds.size());
  fmt::print("  {:<16} {:>10} {:>10} {:>10} {:>10}\n", "policy", "delay_ms", "p4_ms", "final_re%",
             "full_dc_h");
  for (const auto& row : trend_report().aggregates) {
    fmt::print("  {:<16} {:>10.2f} {:>10.2f} {:>10.2f} {:>10.2f}\n", policy::to_string(row.policy),
               1e3 * row.mean_delay.mean, 1e3 * row.mean_delay_by_priority[3].mean,
               row.final_re_pct.mean, row.hours_at_full_duty.mean);
  }
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
