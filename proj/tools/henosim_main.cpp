// henosim command line: run, compare, gen-trace, replay.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "henosim/config.hpp"
#include "henosim/errors.hpp"
#include "henosim/experiment.hpp"
#include "henosim/metrics.hpp"
#include "henosim/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

std::string opt(const std::optional<double>& v, int digits = 6) {
  return v ? fmt::format("{:.{}f}", *v, digits) : std::string("-");
}

void print_report(const henosim::RunReport& report, const std::filesystem::path& dir) {
  fmt::print("config hash {:016x}\n", report.config_hash);
  fmt::print("{:<16} {:>5} {:>12} {:>12} {:>10} {:>10} {:>10}\n", "policy", "runs", "delay_s",
             "p4_delay_s", "final_re%", "eno_h", "full_dc_h");
  for (const auto& row : report.aggregates) {
    const auto mean = [](const henosim::Statistic& s) {
      return s.count > 0 ? std::optional<double>(s.mean) : std::nullopt;
    };
    fmt::print("{:<16} {:>5} {:>12} {:>12} {:>10} {:>10} {:>10}\n",
               henosim::policy::to_string(row.policy), row.runs - row.failed,
               opt(mean(row.mean_delay)), opt(mean(row.mean_delay_by_priority[3])),
               opt(mean(row.final_re_pct), 2), opt(mean(row.eno_hours), 1),
               opt(mean(row.hours_at_full_duty), 2));
  }
  for (const auto& c : report.comparisons) {
    fmt::print("heno-hybrid vs {:<16} all {:>8}%  P4 {:>8}%\n",
               henosim::policy::to_string(c.baseline), opt(c.improvement_pct, 2),
               opt(c.p4_improvement_pct, 2));
  }
  for (const auto& run : report.runs) {
    if (run.error) {
      fmt::print(stderr, "run {} seed {} failed: {}\n", henosim::policy::to_string(run.policy),
                 run.seed, *run.error);
    }
  }
  fmt::print("reports written to {}\n", dir.string());
}

std::vector<henosim::policy::PolicyKind> parse_policies(const std::vector<std::string>& names) {
  std::vector<henosim::policy::PolicyKind> out;
  for (const auto& name : names) {
    std::stringstream ss(name);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) {
        continue;
      }
      const auto kind = henosim::policy::parse_policy_kind(item);
      if (!kind) {
        throw henosim::ConfigError("policies", "unknown policy '" + item + "'");
      }
      out.push_back(*kind);
    }
  }
  return out;
}

int run_batch(const std::string& config_path, const std::vector<std::string>& policy_names,
              const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
              bool event_log, unsigned jobs) {
  const auto config = henosim::load_config(config_path);
  henosim::ExperimentOptions options;
  options.policies = parse_policies(policy_names);
  options.seeds = seeds;
  options.jobs = jobs;
  const std::filesystem::path dir =
      out_dir.empty() ? henosim::default_output_dir() : std::filesystem::path(out_dir);
  if (event_log) {
    options.event_log_dir = dir;
  }
  const auto report = henosim::run_experiment(config, options);
  henosim::write_report(report, dir);
  print_report(report, dir);
  for (const auto& run : report.runs) {
    if (run.error) {
      return kExitInvariant;
    }
  }
  return kExitOk;
}

int replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  henosim::RunRecord record;
  std::string first;
  std::getline(in, first);
  std::istringstream header(first);
  std::string t, star, tag, policy_name;
  header >> t >> star >> tag >> policy_name >> record.seed;
  if (tag == "run") {
    if (const auto kind = henosim::policy::parse_policy_kind(policy_name)) {
      record.policy = *kind;
    }
  } else {
    in.clear();
    in.seekg(0);
  }
  record.metrics = henosim::sim::replay_event_log(in);
  record.summary = henosim::sim::summarize(record.metrics);
  std::cout << henosim::runs_csv_header() << '\n' << henosim::runs_csv_row(record) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Star-network energy-harvesting MAC simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  bool event_log = false;
  std::vector<std::string> policies;
  unsigned jobs = 0;

  auto* run = app.add_subcommand("run", "Run the configured policy over the configured seeds");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--seed", seeds, "Seed(s), overriding the config");
  run->add_option("--out-dir", out_dir, "Output directory (default $HENO_OUT_DIR or ./henosim-out)");
  run->add_flag("--event-log", event_log, "Write one event log per run");
  run->add_option("--jobs", jobs, "Parallel runs (default: hardware threads)");

  auto* cmp = app.add_subcommand("compare", "Run several policies on one trace and seed set");
  cmp->add_option("config", config_path, "Config file")->required();
  cmp->add_option("--policies", policies, "Policies, comma separated")
      ->default_val(std::vector<std::string>{"heno-hybrid,solar-eno,solar-available,fixed"});
  cmp->add_option("--seed", seeds, "Seed(s), overriding the config");
  cmp->add_option("--out-dir", out_dir, "Output directory (default $HENO_OUT_DIR or ./henosim-out)");
  cmp->add_flag("--event-log", event_log, "Write one event log per run");
  cmp->add_option("--jobs", jobs, "Parallel runs (default: hardware threads)");

  std::string kind_name;
  std::string trace_out;
  henosim::SyntheticParams params;
  auto* gen = app.add_subcommand("gen-trace", "Write a synthetic harvest trace as CSV");
  gen->add_option("kind", kind_name, "sinusoidal-solar | gusty-wind | combined | flat")->required();
  gen->add_option("--hours", params.hours, "Length in hours")->capture_default_str();
  gen->add_option("--seed", params.seed, "Noise seed")->capture_default_str();
  gen->add_option("--sample-period", params.sample_period, "Seconds between samples")
      ->capture_default_str();
  gen->add_option("--peak-irradiance", params.peak_irradiance, "W/m^2")->capture_default_str();
  gen->add_option("--sunrise", params.sunrise_hour, "Hour of day")->capture_default_str();
  gen->add_option("--sunset", params.sunset_hour, "Hour of day")->capture_default_str();
  gen->add_option("--night-wind", params.night_wind, "m/s")->capture_default_str();
  gen->add_option("--day-wind", params.day_wind, "m/s")->capture_default_str();
  gen->add_option("--gust", params.gust, "m/s")->capture_default_str();
  gen->add_option("--irradiance", params.flat_irradiance, "Flat trace irradiance, W/m^2");
  gen->add_option("--wind", params.flat_wind, "Flat trace wind speed, m/s");
  gen->add_option("-o,--out", trace_out, "Output file (default stdout)");

  std::string log_path;
  auto* rep = app.add_subcommand("replay", "Rebuild a runs.csv row from an event log");
  rep->add_option("log", log_path, "Event log")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return run_batch(config_path, {}, seeds, out_dir, event_log, jobs);
    }
    if (*cmp) {
      return run_batch(config_path, policies, seeds, out_dir, event_log, jobs);
    }
    if (*gen) {
      const auto kind = henosim::parse_synthetic_kind(kind_name);
      if (!kind) {
        throw henosim::ConfigError("kind", "unknown trace kind '" + kind_name + "'");
      }
      params.kind = *kind;
      const auto trace = henosim::generate_synthetic_trace(params);
      if (trace_out.empty()) {
        henosim::trace::write_trace(std::cout, trace);
      } else {
        std::ofstream out(trace_out);
        henosim::trace::write_trace(out, trace);
      }
      return kExitOk;
    }
    if (*rep) {
      return replay(log_path);
    }
  } catch (const henosim::ConfigError& e) {
    fmt::print(stderr, "config error [{}]: {}\n", e.key(), e.what());
    return kExitConfig;
  } catch (const henosim::ParseError& e) {
    fmt::print(stderr, "parse error: {}\n", e.what());
    return kExitConfig;
  } catch (const henosim::DomainError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const henosim::EmptyInputError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const henosim::InvariantViolation& e) {
    fmt::print(stderr, "invariant violation: {}\n", e.what());
    return kExitInvariant;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitOther;
  }
  return kExitOther;
}
