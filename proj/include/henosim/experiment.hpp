#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "henosim/config.hpp"
#include "henosim/metrics.hpp"
#include "henosim/policy.hpp"
#include "henosim/trace.hpp"

namespace henosim {

/// The harvest trace a configuration refers to: the `trace` file when set,
/// otherwise the synthetic generator stretched to cover the horizon.
trace::HarvestTrace build_trace(const SimConfig& config);

/// build_trace followed by slot aggregation.
std::vector<trace::SlotEnergy> build_slots(const SimConfig& config);

struct RunRecord {
  policy::PolicyKind policy = policy::PolicyKind::heno_hybrid;
  std::uint64_t seed = 0;
  sim::Metrics metrics;
  sim::RunSummary summary;
  std::optional<std::string> error;  // set when the run aborted
};

struct Statistic {
  double mean = 0.0;
  double stdev = 0.0;  // sample standard deviation, 0 for a single value
  std::size_t count = 0;
};

/// Mean and spread of the per-run values. Empty input gives count 0.
Statistic describe(const std::vector<double>& values);

struct AggregateRow {
  policy::PolicyKind policy = policy::PolicyKind::heno_hybrid;
  std::size_t runs = 0;
  std::size_t failed = 0;
  Statistic mean_delay;
  std::array<Statistic, protocol::kPriorityCount> mean_delay_by_priority;
  Statistic delivery_ratio;
  Statistic final_re_pct;
  Statistic eno_hours;
  Statistic hours_at_full_duty;
  Statistic mean_duty_cycle;
};

/// 100 * (baseline - heno) / baseline on the batch means. Absent when either
/// side has no delivered packets.
struct ComparisonRow {
  policy::PolicyKind baseline = policy::PolicyKind::fixed;
  std::optional<double> heno_delay;
  std::optional<double> baseline_delay;
  std::optional<double> improvement_pct;
  std::optional<double> heno_p4_delay;
  std::optional<double> baseline_p4_delay;
  std::optional<double> p4_improvement_pct;
};

struct RunReport {
  std::string config_echo;
  std::uint64_t config_hash = 0;
  std::vector<RunRecord> runs;
  std::vector<AggregateRow> aggregates;
  std::vector<ComparisonRow> comparisons;
};

struct ExperimentOptions {
  std::vector<policy::PolicyKind> policies;  // empty: the configured policy
  std::vector<std::uint64_t> seeds;          // empty: the configured seeds
  /// When set, each run writes events_<policy>_seed<k>.log here.
  std::optional<std::filesystem::path> event_log_dir;
  /// Worker threads; 0 picks the hardware concurrency. Results do not
  /// depend on this.
  unsigned jobs = 0;
};

/// Runs every (policy, seed) pair on one shared trace, in policy-major order. A run that throws
/// InvariantViolation is kept in the report with its error; config errors
/// propagate.
RunReport run_experiment(const SimConfig& config, const ExperimentOptions& options = {});

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& runs);
std::vector<ComparisonRow> compare(const std::vector<AggregateRow>& aggregates);

/// Header and one row of runs.csv.
std::string runs_csv_header();
std::string runs_csv_row(const RunRecord& run);

/// Writes runs.csv, aggregate.csv, delays.csv, compare.csv, per-run energy
/// and duty-cycle CSVs, config.txt and summary.json into `dir`.
void write_report(const RunReport& report, const std::filesystem::path& dir);

/// HENO_OUT_DIR when set, otherwise ./henosim-out.
std::filesystem::path default_output_dir();

}  // namespace henosim
