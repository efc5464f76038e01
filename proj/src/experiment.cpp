#include "henosim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "henosim/errors.hpp"
#include "henosim/simulator.hpp"
#include "henosim/synthetic.hpp"

namespace henosim {

namespace {

std::string num(double v) { return fmt::format("{}", v); }

std::string num(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : ""; }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

std::string run_stem(const RunRecord& run) {
  return fmt::format("{}_seed{}", policy::to_string(run.policy), run.seed);
}

nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json stat_json(const Statistic& s) {
  return {{"mean", s.mean}, {"stdev", s.stdev}, {"count", s.count}};
}

}  // namespace

trace::HarvestTrace build_trace(const SimConfig& config) {
  if (!config.trace_path.empty()) {
    std::ifstream in(config.trace_path);
    if (!in) {
      throw ConfigError("trace", "cannot open " + config.trace_path);
    }
    return trace::parse_trace(in);
  }
  auto params = config.synthetic;
  params.hours = std::max(1.0, std::ceil(config.horizon / 3600.0));
  return generate_synthetic_trace(params);
}

std::vector<trace::SlotEnergy> build_slots(const SimConfig& config) {
  return trace::slot_aggregate(build_trace(config), config.harvest, config.partial_slots);
}

Statistic describe(const std::vector<double>& values) {
  Statistic s;
  s.count = values.size();
  if (values.empty()) {
    return s;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) {
      sq += (v - s.mean) * (v - s.mean);
    }
    s.stdev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

RunReport run_experiment(const SimConfig& config, const ExperimentOptions& options) {
  config.validate();
  RunReport report;
  report.config_echo = config_echo(config);
  report.config_hash = fnv1a64(report.config_echo);

  const auto slots = build_slots(config);
  auto policies = options.policies;
  if (policies.empty()) {
    policies.push_back(config.policy.kind);
  }
  const auto& seeds = options.seeds.empty() ? config.seeds : options.seeds;

  for (const auto kind : policies) {
    for (const auto seed : seeds) {
      RunRecord record;
      record.policy = kind;
      record.seed = seed;
      report.runs.push_back(std::move(record));
    }
  }
  if (options.event_log_dir) {
    std::filesystem::create_directories(*options.event_log_dir);
  }

  const auto execute = [&](RunRecord& record) {
    SimConfig run_config = config;
    run_config.policy.kind = record.policy;
    std::ofstream log;
    if (options.event_log_dir) {
      log = open_out(*options.event_log_dir / ("events_" + run_stem(record) + ".log"));
      log << "0 * run " << policy::to_string(record.policy) << ' ' << record.seed << '\n';
    }
    try {
      record.metrics = sim::run(run_config, slots, record.seed, log.is_open() ? &log : nullptr);
      record.summary = sim::summarize(record.metrics);
    } catch (const InvariantViolation& e) {
      record.error = e.what();
    }
  };

  unsigned jobs = options.jobs != 0 ? options.jobs : std::thread::hardware_concurrency();
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(report.runs.size())));
  if (jobs <= 1) {
    for (auto& record : report.runs) {
      execute(record);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(jobs);
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < report.runs.size(); i = next++) {
            execute(report.runs[i]);
          }
        } catch (...) {
          failures[w] = std::current_exception();
          next = report.runs.size();
        }
      });
    }
    for (auto& t : workers) {
      t.join();
    }
    for (const auto& f : failures) {
      if (f) {
        std::rethrow_exception(f);
      }
    }
  }
  report.aggregates = aggregate(report.runs);
  report.comparisons = compare(report.aggregates);
  return report;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& runs) {
  std::vector<AggregateRow> rows;
  for (const auto& run : runs) {
    if (std::none_of(rows.begin(), rows.end(),
                     [&](const AggregateRow& r) { return r.policy == run.policy; })) {
      AggregateRow row;
      row.policy = run.policy;
      rows.push_back(row);
    }
  }
  for (auto& row : rows) {
    std::vector<double> delay;
    std::array<std::vector<double>, protocol::kPriorityCount> by_priority;
    std::vector<double> ratio, final_re, eno, full, duty;
    for (const auto& run : runs) {
      if (run.policy != row.policy) {
        continue;
      }
      ++row.runs;
      if (run.error) {
        ++row.failed;
        continue;
      }
      const auto& s = run.summary;
      if (s.mean_delay) {
        delay.push_back(*s.mean_delay);
      }
      for (std::size_t p = 0; p < protocol::kPriorityCount; ++p) {
        if (s.mean_delay_by_priority[p]) {
          by_priority[p].push_back(*s.mean_delay_by_priority[p]);
        }
      }
      ratio.push_back(s.delivery_ratio);
      final_re.push_back(s.final_re_pct);
      eno.push_back(s.eno_hours);
      full.push_back(s.hours_at_full_duty);
      duty.push_back(s.mean_duty_cycle);
    }
    row.mean_delay = describe(delay);
    for (std::size_t p = 0; p < protocol::kPriorityCount; ++p) {
      row.mean_delay_by_priority[p] = describe(by_priority[p]);
    }
    row.delivery_ratio = describe(ratio);
    row.final_re_pct = describe(final_re);
    row.eno_hours = describe(eno);
    row.hours_at_full_duty = describe(full);
    row.mean_duty_cycle = describe(duty);
  }
  return rows;
}

std::vector<ComparisonRow> compare(const std::vector<AggregateRow>& aggregates) {
  std::vector<ComparisonRow> rows;
  const auto heno = std::find_if(aggregates.begin(), aggregates.end(), [](const AggregateRow& r) {
    return r.policy == policy::PolicyKind::heno_hybrid;
  });
  if (heno == aggregates.end()) {
    return rows;
  }
  const auto mean_of = [](const Statistic& s) -> std::optional<double> {
    return s.count > 0 ? std::optional<double>(s.mean) : std::nullopt;
  };
  const auto improvement = [](const std::optional<double>& base,
                              const std::optional<double>& ours) -> std::optional<double> {
    if (!base || !ours || *base <= 0.0) {
      return std::nullopt;
    }
    return 100.0 * (*base - *ours) / *base;
  };
  const auto p4 = protocol::index_of(protocol::Priority::P4);
  for (const auto& row : aggregates) {
    if (row.policy == policy::PolicyKind::heno_hybrid) {
      continue;
    }
    ComparisonRow c;
    c.baseline = row.policy;
    c.heno_delay = mean_of(heno->mean_delay);
    c.baseline_delay = mean_of(row.mean_delay);
    c.improvement_pct = improvement(c.baseline_delay, c.heno_delay);
    c.heno_p4_delay = mean_of(heno->mean_delay_by_priority[p4]);
    c.baseline_p4_delay = mean_of(row.mean_delay_by_priority[p4]);
    c.p4_improvement_pct = improvement(c.baseline_p4_delay, c.heno_p4_delay);
    rows.push_back(c);
  }
  return rows;
}

std::string runs_csv_header() {
  return "policy,seed,status,generated,delivered,dropped,collided,pending,delivery_ratio,"
         "mean_delay_s,mean_delay_p1_s,mean_delay_p2_s,mean_delay_p3_s,mean_delay_p4_s,"
         "final_re_pct,min_re_pct,eno_hours,hours_full_duty,mean_duty_cycle,receiver_death_h,"
         "audit_error";
}

std::string runs_csv_row(const RunRecord& run) {
  const auto& s = run.summary;
  if (run.error) {
    return fmt::format("{},{},failed{}", policy::to_string(run.policy), run.seed,
                       std::string(18, ','));
  }
  return fmt::format("{},{},ok,{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                     policy::to_string(run.policy), run.seed, s.generated, s.delivered, s.dropped,
                     s.collided, s.pending, num(s.delivery_ratio), num(s.mean_delay),
                     num(s.mean_delay_by_priority[0]), num(s.mean_delay_by_priority[1]),
                     num(s.mean_delay_by_priority[2]), num(s.mean_delay_by_priority[3]),
                     num(s.final_re_pct), num(s.min_re_pct), num(s.eno_hours),
                     num(s.hours_at_full_duty), num(s.mean_duty_cycle),
                     num(s.receiver_death_hours), num(run.metrics.energy_audit_error));
}

void write_report(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    auto out = open_out(dir / "config.txt");
    out << report.config_echo;
  }
  {
    auto out = open_out(dir / "runs.csv");
    out << runs_csv_header() << '\n';
    for (const auto& run : report.runs) {
      out << runs_csv_row(run) << '\n';
    }
  }
  {
    auto out = open_out(dir / "aggregate.csv");
    out << "policy,runs,failed";
    for (const char* name : {"mean_delay_s", "mean_delay_p1_s", "mean_delay_p2_s",
                             "mean_delay_p3_s", "mean_delay_p4_s", "delivery_ratio",
                             "final_re_pct", "eno_hours", "hours_full_duty", "mean_duty_cycle"}) {
      out << ',' << name << "_mean," << name << "_stdev";
    }
    out << '\n';
    for (const auto& row : report.aggregates) {
      out << policy::to_string(row.policy) << ',' << row.runs << ',' << row.failed;
      const auto put = [&](const Statistic& s) {
        if (s.count == 0) {
          out << ",,";
        } else {
          out << ',' << num(s.mean) << ',' << num(s.stdev);
        }
      };
      put(row.mean_delay);
      for (const auto& p : row.mean_delay_by_priority) {
        put(p);
      }
      put(row.delivery_ratio);
      put(row.final_re_pct);
      put(row.eno_hours);
      put(row.hours_at_full_duty);
      put(row.mean_duty_cycle);
      out << '\n';
    }
  }
  {
    auto out = open_out(dir / "delays.csv");
    out << "policy,seed,priority,count,mean_s,p50_s,p95_s,max_s\n";
    for (const auto& run : report.runs) {
      if (run.error) {
        continue;
      }
      for (std::size_t p = 0; p < protocol::kPriorityCount; ++p) {
        auto samples = run.metrics.delays[p];
        out << policy::to_string(run.policy) << ',' << run.seed << ",P" << p + 1 << ','
            << samples.size();
        if (samples.empty()) {
          out << ",,,,\n";
          continue;
        }
        std::sort(samples.begin(), samples.end());
        const auto rank = [&](double q) {
          const auto i = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
          return samples[std::min(samples.size() - 1, i == 0 ? 0 : i - 1)];
        };
        out << ',' << num(*run.summary.mean_delay_by_priority[p]) << ',' << num(rank(0.5)) << ','
            << num(rank(0.95)) << ',' << num(samples.back()) << '\n';
      }
    }
  }
  {
    auto out = open_out(dir / "compare.csv");
    out << "baseline,heno_delay_s,baseline_delay_s,improvement_pct,heno_p4_delay_s,"
           "baseline_p4_delay_s,p4_improvement_pct\n";
    for (const auto& c : report.comparisons) {
      out << policy::to_string(c.baseline) << ',' << num(c.heno_delay) << ','
          << num(c.baseline_delay) << ',' << num(c.improvement_pct) << ','
          << num(c.heno_p4_delay) << ',' << num(c.baseline_p4_delay) << ','
          << num(c.p4_improvement_pct) << '\n';
    }
  }
  for (const auto& run : report.runs) {
    if (run.error) {
      continue;
    }
    auto energy = open_out(dir / ("energy_" + run_stem(run) + ".csv"));
    energy << "time_s,re_pct\n";
    for (const auto& tv : run.metrics.energy_trajectory) {
      energy << num(tv.time) << ',' << num(tv.value) << '\n';
    }
    auto duty = open_out(dir / ("dutycycle_" + run_stem(run) + ".csv"));
    duty << "time_s,d_c\n";
    for (const auto& tv : run.metrics.duty_cycle_trace) {
      duty << num(tv.time) << ',' << num(tv.value) << '\n';
    }
  }

  nlohmann::ordered_json j;
  j["config_hash"] = fmt::format("{:016x}", report.config_hash);
  j["config"] = report.config_echo;
  auto& runs = j["runs"] = nlohmann::ordered_json::array();
  for (const auto& run : report.runs) {
    nlohmann::ordered_json r;
    r["policy"] = policy::to_string(run.policy);
    r["seed"] = run.seed;
    if (run.error) {
      r["error"] = *run.error;
      runs.push_back(r);
      continue;
    }
    const auto& s = run.summary;
    r["generated"] = s.generated;
    r["delivered"] = s.delivered;
    r["dropped"] = s.dropped;
    r["collided"] = s.collided;
    r["delivery_ratio"] = s.delivery_ratio;
    r["mean_delay_s"] = opt_json(s.mean_delay);
    r["mean_delay_p4_s"] = opt_json(s.mean_delay_by_priority[3]);
    r["final_re_pct"] = s.final_re_pct;
    r["eno_hours"] = s.eno_hours;
    r["hours_full_duty"] = s.hours_at_full_duty;
    r["receiver_death_h"] = opt_json(s.receiver_death_hours);
    r["audit_error"] = run.metrics.energy_audit_error;
    runs.push_back(r);
  }
  auto& aggs = j["aggregates"] = nlohmann::ordered_json::array();
  for (const auto& row : report.aggregates) {
    aggs.push_back({{"policy", policy::to_string(row.policy)},
                    {"runs", row.runs},
                    {"failed", row.failed},
                    {"mean_delay_s", stat_json(row.mean_delay)},
                    {"mean_delay_p4_s", stat_json(row.mean_delay_by_priority[3])},
                    {"final_re_pct", stat_json(row.final_re_pct)},
                    {"hours_full_duty", stat_json(row.hours_at_full_duty)}});
  }
  auto& cmp = j["comparisons"] = nlohmann::ordered_json::array();
  for (const auto& c : report.comparisons) {
    cmp.push_back({{"baseline", policy::to_string(c.baseline)},
                   {"improvement_pct", opt_json(c.improvement_pct)},
                   {"p4_improvement_pct", opt_json(c.p4_improvement_pct)}});
  }
  auto out = open_out(dir / "summary.json");
  out << j.dump(2) << '\n';
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("HENO_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "henosim-out";
}

}  // namespace henosim
