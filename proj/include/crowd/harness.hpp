#pragma once

// Scenario configs and the experiment harness behind the command-line tool.
//
// A scenario is a JSON object with "schema": 1. Unknown keys anywhere are an
// error. Repetition r runs with seed + r. Outputs:
//   runs.csv      one row per run (metrics::kCsvHeader)
//   summary.csv   metric,mean,sd,n
//   summary.md    the same as a markdown table
// compare and sweep-checkpoint write their own table (comparison.md, sweep.md)
// next to runs.csv; fault-demo writes trace.txt.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "crowd/coordinator.hpp"
#include "crowd/error.hpp"
#include "crowd/fleet.hpp"
#include "crowd/metrics.hpp"
#include "crowd/scheduler.hpp"
#include "crowd/simulation.hpp"
#include "crowd/tcp.hpp"
#include "crowd/workloads.hpp"

namespace crowd::harness {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Mode { Sim, Tcp };

inline Mode mode_from_string(const std::string& s) {
  if (s == "sim") return Mode::Sim;
  if (s == "tcp") return Mode::Tcp;
  fail(ErrorCode::ConfigError, "mode must be 'sim' or 'tcp', got '" + s + "'");
}

enum class ChurnSource { None, Rates, Events };

struct Scenario {
  std::string name = "scenario";
  sim::SimulationConfig sim;
  ChurnSource churn = ChurnSource::None;
  coordinator::JobSpec job;
  double units_per_item = 0.0;  // 0 keeps the workload's default
  Mode mode = Mode::Sim;
  std::uint16_t port = 0;
  std::uint64_t seed = 1;
  std::uint32_t repetitions = 1;
  metrics::FairnessBasis fairness = metrics::FairnessBasis::Tasks;
  std::vector<std::string> compare;
  std::vector<double> intervals;
};

namespace detail {

/// Strict view of one JSON object: every key must be consumed.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail(ErrorCode::ConfigError, where_ + " must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json& at(const char* key) {
    used_.insert(key);
    if (!j_.contains(key)) fail(ErrorCode::ConfigError, where_ + " is missing '" + key + "'");
    return j_.at(key);
  }

  template <typename T>
  T get(const char* key) {
    const json& v = at(key);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      fail(ErrorCode::ConfigError, where_ + "." + key + " has the wrong type");
    }
  }

  template <typename T>
  T get_or(const char* key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  std::string path(const char* key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!used_.count(key)) fail(ErrorCode::ConfigError, "unknown key '" + key + "' in " + where_);
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

inline double positive(double v, const std::string& what) {
  if (!(v > 0.0)) fail(ErrorCode::ConfigError, what + " must be positive");
  return v;
}

inline fleet::DeviceProfile parse_profile(const json& j, const std::string& where) {
  Fields f(j, where);
  fleet::DeviceProfile p;
  p.id = f.get<std::string>("id");
  p.cores = f.get<int>("cores");
  p.freq_ghz = f.get<double>("freq_ghz");
  p.ram_gb = f.get<double>("ram_gb");
  p.background_load = f.get_or("background_load", p.background_load);
  p.churn_rate_per_min = f.get_or("churn_rate_per_min", p.churn_rate_per_min);
  p.reconnect_min_s = f.get_or("reconnect_min_s", p.reconnect_min_s);
  p.reconnect_max_s = f.get_or("reconnect_max_s", p.reconnect_max_s);
  f.finish();
  return p;
}

/// Adjusts individual profiles of the named fleet, keyed by device id.
inline void apply_overrides(std::vector<fleet::DeviceProfile>& profiles, const json& j) {
  if (!j.is_object()) fail(ErrorCode::ConfigError, "fleet_overrides must be an object");
  for (const auto& [id, patch] : j.items()) {
    auto it = std::find_if(profiles.begin(), profiles.end(), [&](const auto& p) { return p.id == id; });
    if (it == profiles.end()) fail(ErrorCode::ConfigError, "fleet_overrides names unknown device '" + id + "'");
    Fields f(patch, "fleet_overrides." + id);
    it->cores = f.get_or("cores", it->cores);
    it->freq_ghz = f.get_or("freq_ghz", it->freq_ghz);
    it->ram_gb = f.get_or("ram_gb", it->ram_gb);
    it->background_load = f.get_or("background_load", it->background_load);
    it->churn_rate_per_min = f.get_or("churn_rate_per_min", it->churn_rate_per_min);
    it->reconnect_min_s = f.get_or("reconnect_min_s", it->reconnect_min_s);
    it->reconnect_max_s = f.get_or("reconnect_max_s", it->reconnect_max_s);
    f.finish();
  }
}

inline fleet::ChurnKind churn_kind(const std::string& s) {
  if (s == "disconnect") return fleet::ChurnKind::Disconnect;
  if (s == "reconnect") return fleet::ChurnKind::Reconnect;
  fail(ErrorCode::ConfigError, "churn event kind must be 'disconnect' or 'reconnect'");
}

}  // namespace detail

inline Scenario parse_scenario(const json& root, const scheduler::StrategyRegistry& registry = {}) {
  try {
    detail::Fields f(root, "config");
    if (f.get<int>("schema") != kSchemaVersion) {
      fail(ErrorCode::ConfigError, "unsupported schema (expected " + std::to_string(kSchemaVersion) + ")");
    }
    Scenario s;
    s.name = f.get_or<std::string>("name", s.name);

    const json& fleet_j = f.at("fleet");
    if (fleet_j.is_string()) {
      if (fleet_j.get<std::string>() != "default6") {
        fail(ErrorCode::ConfigError, "unknown fleet '" + fleet_j.get<std::string>() + "'");
      }
      s.sim.fleet = fleet::default_fleet();
    } else if (fleet_j.is_array()) {
      for (std::size_t i = 0; i < fleet_j.size(); ++i) {
        s.sim.fleet.push_back(detail::parse_profile(fleet_j[i], "fleet[" + std::to_string(i) + "]"));
      }
    } else {
      fail(ErrorCode::ConfigError, "fleet must be \"default6\" or a list of profiles");
    }
    if (f.has("fleet_overrides")) detail::apply_overrides(s.sim.fleet, f.at("fleet_overrides"));
    try {
      fleet::validate_fleet(s.sim.fleet);
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, e.what());
    }

    {
      detail::Fields w(f.at("workload"), "workload");
      s.job.workload = w.get<std::string>("name");
      s.job.total_work = w.get<std::uint64_t>("total");
      s.job.task_count = w.get<std::uint64_t>("tasks");
      s.units_per_item = w.get_or("units_per_item", 0.0);
      if (s.units_per_item < 0.0) fail(ErrorCode::ConfigError, "workload.units_per_item must be >= 0");
      w.finish();
      if (s.job.workload != "montecarlo" && s.job.workload != "tilemap") {
        fail(ErrorCode::ConfigError, "unknown workload '" + s.job.workload + "'");
      }
      if (s.job.task_count < 1 || s.job.task_count > s.job.total_work) {
        fail(ErrorCode::ConfigError, "workload.tasks must be in [1, workload.total]");
      }
    }

    s.job.strategy = f.get<std::string>("strategy");
    if (!registry.contains(s.job.strategy)) fail(ErrorCode::ConfigError, "unknown strategy '" + s.job.strategy + "'");

    if (f.has("checkpoint")) {
      detail::Fields c(f.at("checkpoint"), "checkpoint");
      s.job.checkpoint.enabled = c.get_or("enabled", true);
      s.job.checkpoint.interval_s = detail::positive(c.get_or("interval_s", 5.0), "checkpoint.interval_s");
      s.job.checkpoint.compaction_threshold = c.get_or<std::size_t>("k", 50);
      if (s.job.checkpoint.compaction_threshold < 1) fail(ErrorCode::ConfigError, "checkpoint.k must be >= 1");
      c.finish();
    }

    if (f.has("link")) {
      detail::Fields l(f.at("link"), "link");
      auto& link = s.sim.link;
      link.base_latency_s = l.get_or("base_latency_s", link.base_latency_s);
      link.jitter_s = l.get_or("jitter_s", link.jitter_s);
      link.drop_probability = l.get_or("drop_probability", link.drop_probability);
      if (l.has("partitions")) link.partitions = l.get<std::vector<std::pair<double, double>>>("partitions");
      l.finish();
      try {
        link.validate();
      } catch (const Error& e) {
        fail(ErrorCode::ConfigError, e.what());
      }
    }

    if (f.has("overheads")) {
      detail::Fields o(f.at("overheads"), "overheads");
      auto& cc = s.sim.coordinator;
      auto& ov = s.sim.overheads;
      cc.job_overhead_s = o.get_or("job_s", cc.job_overhead_s);
      cc.dispatch_overhead_s = o.get_or("dispatch_s", cc.dispatch_overhead_s);
      ov.checkpoint_setup_s = o.get_or("checkpoint_setup_s", ov.checkpoint_setup_s);
      ov.checkpoint_record_s = o.get_or("checkpoint_record_s", ov.checkpoint_record_s);
      o.finish();
      for (double v : {cc.job_overhead_s, cc.dispatch_overhead_s, ov.checkpoint_setup_s, ov.checkpoint_record_s}) {
        if (!(v >= 0.0)) fail(ErrorCode::ConfigError, "overheads must be >= 0");
      }
    }

    if (f.has("coordinator")) {
      detail::Fields c(f.at("coordinator"), "coordinator");
      auto& cc = s.sim.coordinator;
      cc.heartbeat_interval_s =
          detail::positive(c.get_or("heartbeat_interval_s", cc.heartbeat_interval_s), "heartbeat_interval_s");
      cc.heartbeat_timeout_s =
          detail::positive(c.get_or("heartbeat_timeout_s", cc.heartbeat_timeout_s), "heartbeat_timeout_s");
      cc.max_attempts = c.get_or("max_attempts", cc.max_attempts);
      cc.assignment_grace_s =
          detail::positive(c.get_or("assignment_grace_s", cc.assignment_grace_s), "assignment_grace_s");
      c.finish();
      if (cc.max_attempts < 1) fail(ErrorCode::ConfigError, "coordinator.max_attempts must be >= 1");
    }

    if (f.has("churn")) {
      detail::Fields c(f.at("churn"), "churn");
      const auto source = c.get<std::string>("source");
      if (source == "none") {
        s.churn = ChurnSource::None;
      } else if (source == "rates") {
        s.churn = ChurnSource::Rates;
        s.sim.churn_horizon_s = detail::positive(c.get_or("horizon_s", s.sim.churn_horizon_s), "churn.horizon_s");
      } else if (source == "events") {
        s.churn = ChurnSource::Events;
        std::vector<fleet::ChurnEvent> events;
        const json& list = c.at("events");
        if (!list.is_array()) fail(ErrorCode::ConfigError, "churn.events must be a list");
        for (std::size_t i = 0; i < list.size(); ++i) {
          detail::Fields e(list[i], "churn.events[" + std::to_string(i) + "]");
          fleet::ChurnEvent ev;
          ev.worker_id = e.get<std::string>("worker");
          ev.kind = detail::churn_kind(e.get<std::string>("kind"));
          ev.at_s = e.get<double>("at_s");
          e.finish();
          const bool known = std::any_of(s.sim.fleet.begin(), s.sim.fleet.end(),
                                         [&](const auto& p) { return p.id == ev.worker_id; });
          if (!known) fail(ErrorCode::ConfigError, "churn event names unknown worker '" + ev.worker_id + "'");
          if (!(ev.at_s >= 0.0)) fail(ErrorCode::ConfigError, "churn event times must be >= 0");
          events.push_back(ev);
        }
        std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.at_s < b.at_s; });
        s.sim.churn_schedule = std::move(events);
      } else {
        fail(ErrorCode::ConfigError, "churn.source must be 'none', 'rates' or 'events'");
      }
      c.finish();
    }
    if (s.churn == ChurnSource::None) s.sim.churn_schedule = std::vector<fleet::ChurnEvent>{};

    s.sim.unit_scale = detail::positive(f.get_or("unit_scale", s.sim.unit_scale), "unit_scale");
    s.mode = mode_from_string(f.get_or<std::string>("mode", "sim"));
    s.seed = f.get_or<std::uint64_t>("seed", s.seed);
    s.repetitions = f.get_or<std::uint32_t>("repetitions", s.repetitions);
    if (s.repetitions < 1) fail(ErrorCode::ConfigError, "repetitions must be >= 1");

    const auto basis = f.get_or<std::string>("fairness", "tasks");
    if (basis == "tasks") {
      s.fairness = metrics::FairnessBasis::Tasks;
    } else if (basis == "busy_seconds") {
      s.fairness = metrics::FairnessBasis::BusySeconds;
    } else {
      fail(ErrorCode::ConfigError, "fairness must be 'tasks' or 'busy_seconds'");
    }

    s.compare = f.get_or("compare", std::vector<std::string>{});
    for (const auto& name : s.compare) {
      if (!registry.contains(name)) fail(ErrorCode::ConfigError, "unknown strategy '" + name + "'");
    }
    s.intervals = f.get_or("intervals", std::vector<double>{});
    for (double v : s.intervals) detail::positive(v, "each interval");
    f.finish();
    return s;
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("malformed config: ") + e.what());
  }
}

inline Scenario load_scenario(const std::string& path, const scheduler::StrategyRegistry& registry = {}) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot read config " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, path + ": " + e.what());
  }
  return parse_scenario(root, registry);
}

// ---------------------------------------------------------------------------
// Running

struct RunOutcome {
  sim::SimulationResult result;
  metrics::RunSummary summary;
};

inline std::unique_ptr<workloads::ResumableTask> workload_for(const Scenario& s) {
  if (s.units_per_item > 0.0) return workloads::make_workload(s.job.workload, s.units_per_item);
  return workloads::make_workload(s.job.workload, s.job.workload == "montecarlo" ? 3e-5 : 0.01);
}

inline std::vector<double> allocations(const coordinator::JobResult& job, metrics::FairnessBasis basis) {
  std::vector<double> out;
  if (basis == metrics::FairnessBasis::Tasks) {
    for (const auto& [_, n] : job.tasks_per_worker) out.push_back(double(n));
  } else {
    for (const auto& [_, s] : job.busy_s_per_worker) out.push_back(s);
  }
  return out;
}

/// Wall time of the whole job computed in one thread, for tcp-mode speedup.
inline double measure_local_seconds(const workloads::ResumableTask& workload, const coordinator::JobSpec& job) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& t : coordinator::decompose(job)) {
    auto state = workload.init(t.params);
    workload.run_slice(state, workload.remaining(state));
    (void)workload.finalize(state);
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline RunOutcome run_once(const Scenario& s, std::uint64_t seed, const scheduler::StrategyRegistry& registry = {}) {
  auto workload = workload_for(s);
  coordinator::JobSpec job = s.job;
  job.seed = seed;
  job.job_id = s.name;

  RunOutcome out;
  double single_s;
  if (s.mode == Mode::Sim) {
    out.result = sim::simulate(s.sim, job, *workload, registry);
    single_s = sim::best_single_device_seconds(s.sim.fleet, *workload, job.total_work, s.sim.telemetry,
                                               s.sim.unit_scale);
  } else {
    tcp::TcpOptions options;
    options.port = s.port;
    out.result = tcp::run_tcp(s.sim, job, *workload, options, registry);
    single_s = measure_local_seconds(*workload, job);
  }

  auto& r = out.summary;
  r.scenario = s.name;
  r.strategy = job.strategy;
  r.checkpointing = job.checkpoint.enabled;
  r.interval_s = job.checkpoint.interval_s;
  r.seed = seed;
  if (out.result.completed) {
    r.makespan_s = out.result.job->makespan_s;
    r.allocations = allocations(*out.result.job, s.fairness);
    r.fairness = metrics::jains_index(r.allocations);
    r.speedup = metrics::speedup(std::max(single_s, 1e-9), std::max(r.makespan_s, 1e-9));
  }
  return out;
}

struct Report {
  std::vector<metrics::RunSummary> runs;
  std::string table;  // markdown
  bool failed = false;
};

inline std::string fmt(double v, int precision = 3) { return metrics::format_number(v, precision); }

inline std::vector<metrics::RunSummary> repeat(const Scenario& s, bool& failed,
                                               const scheduler::StrategyRegistry& registry = {}) {
  std::vector<metrics::RunSummary> runs;
  for (std::uint32_t rep = 0; rep < s.repetitions; ++rep) {
    auto o = run_once(s, s.seed + rep, registry);
    if (!o.result.completed) {
      failed = true;
      return runs;
    }
    runs.push_back(std::move(o.summary));
  }
  return runs;
}

template <typename F>
metrics::MeanSd stat(const std::vector<metrics::RunSummary>& runs, F field) {
  std::vector<double> xs;
  for (const auto& r : runs) xs.push_back(field(r));
  return metrics::mean_sd(xs);
}

/// summary.csv content: metric,mean,sd,n.
inline std::string summary_csv(const std::vector<metrics::RunSummary>& runs) {
  std::string out = "metric,mean,sd,n\n";
  auto row = [&](const char* name, metrics::MeanSd m) {
    out += std::string(name) + "," + metrics::format_number(m.mean) + "," + metrics::format_number(m.sd) + "," +
           std::to_string(runs.size()) + "\n";
  };
  row("makespan_s", stat(runs, [](const auto& r) { return r.makespan_s; }));
  row("J", stat(runs, [](const auto& r) { return r.fairness; }));
  row("speedup", stat(runs, [](const auto& r) { return r.speedup; }));
  return out;
}

inline Report run(const Scenario& s, const scheduler::StrategyRegistry& registry = {}) {
  Report rep;
  rep.runs = repeat(s, rep.failed, registry);
  if (rep.failed) return rep;
  std::ostringstream md;
  md << "# " << s.name << "\n\n"
     << "strategy " << s.job.strategy << ", " << s.job.total_work << " " << s.job.workload << " items in "
     << s.job.task_count << " tasks, n=" << rep.runs.size() << " (seeds " << s.seed << ".."
     << s.seed + rep.runs.size() - 1 << ")\n\n"
     << "| metric | mean | sd |\n|---|---|---|\n";
  auto line = [&](const char* name, metrics::MeanSd m, int p) {
    md << "| " << name << " | " << fmt(m.mean, p) << " | " << fmt(m.sd, p) << " |\n";
  };
  line("makespan (s)", stat(rep.runs, [](const auto& r) { return r.makespan_s; }), 3);
  line("Jain's J", stat(rep.runs, [](const auto& r) { return r.fairness; }), 4);
  line("speedup vs best single device", stat(rep.runs, [](const auto& r) { return r.speedup; }), 3);
  rep.table = md.str();
  return rep;
}

/// Runs every strategy on identical seeds; improvement is relative to the first.
inline Report compare(const Scenario& base, const std::vector<std::string>& strategies,
                      const scheduler::StrategyRegistry& registry = {}) {
  if (strategies.size() < 2) fail(ErrorCode::ConfigError, "compare needs at least two strategies");
  for (const auto& name : strategies) {
    if (!registry.contains(name)) fail(ErrorCode::ConfigError, "unknown strategy '" + name + "'");
  }
  Report rep;
  std::vector<std::pair<std::string, metrics::MeanSd>> rows;
  for (const auto& name : strategies) {
    Scenario s = base;
    s.job.strategy = name;
    auto runs = repeat(s, rep.failed, registry);
    if (rep.failed) return rep;
    rows.emplace_back(name, stat(runs, [](const auto& r) { return r.makespan_s; }));
    rep.runs.insert(rep.runs.end(), runs.begin(), runs.end());
  }
  std::ostringstream md;
  md << "# " << base.name << ": strategy comparison\n\n"
     << "| strategy | makespan mean (s) | sd | improvement vs " << rows.front().first << " (%) |\n"
     << "|---|---|---|---|\n";
  const double ref = rows.front().second.mean;
  for (const auto& [name, m] : rows) {
    md << "| " << name << " | " << fmt(m.mean) << " | " << fmt(m.sd) << " | " << fmt(100.0 * (ref - m.mean) / ref, 1)
       << " |\n";
  }
  rep.table = md.str();
  return rep;
}

/// Checkpointing disabled first, then each interval. Overhead per run is the
/// makespan difference against the disabled run with the same seed.
inline Report sweep_checkpoint(const Scenario& base, const std::vector<double>& intervals,
                               const scheduler::StrategyRegistry& registry = {}) {
  if (intervals.empty()) fail(ErrorCode::ConfigError, "sweep needs at least one interval");
  for (double v : intervals) detail::positive(v, "each interval");
  Report rep;
  Scenario off = base;
  off.job.checkpoint.enabled = false;
  auto disabled = repeat(off, rep.failed, registry);
  if (rep.failed) return rep;

  std::ostringstream md;
  md << "# " << base.name << ": checkpoint interval sweep\n\n"
     << "| checkpointing | interval (s) | makespan mean (s) | sd | overhead mean (s) |\n|---|---|---|---|---|\n";
  md << "| off | | " << fmt(stat(disabled, [](const auto& r) { return r.makespan_s; }).mean) << " | "
     << fmt(stat(disabled, [](const auto& r) { return r.makespan_s; }).sd) << " | |\n";
  rep.runs = disabled;
  for (double interval : intervals) {
    Scenario s = base;
    s.job.checkpoint.enabled = true;
    s.job.checkpoint.interval_s = interval;
    auto runs = repeat(s, rep.failed, registry);
    if (rep.failed) return rep;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      runs[i].has_overhead = true;
      runs[i].overhead_s = metrics::checkpoint_overhead(runs[i].makespan_s, disabled[i].makespan_s);
    }
    const auto m = stat(runs, [](const auto& r) { return r.makespan_s; });
    md << "| on | " << fmt(interval, 2) << " | " << fmt(m.mean) << " | " << fmt(m.sd) << " | "
       << fmt(stat(runs, [](const auto& r) { return r.overhead_s; }).mean) << " |\n";
    rep.runs.insert(rep.runs.end(), runs.begin(), runs.end());
  }
  rep.table = md.str();
  return rep;
}

/// One scripted-churn run; the trace interleaves coordinator and device events
/// in time order. Without configured events, the first device drops one
/// second after submit and returns past the heartbeat timeout.
inline std::vector<std::string> fault_demo(Scenario s, bool& failed,
                                           const scheduler::StrategyRegistry& registry = {}) {
  if (s.churn != ChurnSource::Events) {
    const auto& id = s.sim.fleet.front().id;
    const double back = 1.0 + s.sim.coordinator.heartbeat_timeout_s + 2.0 * s.sim.coordinator.heartbeat_interval_s;
    s.sim.churn_schedule =
        std::vector<fleet::ChurnEvent>{{id, fleet::ChurnKind::Disconnect, 1.0}, {id, fleet::ChurnKind::Reconnect, back}};
    s.churn = ChurnSource::Events;
  }
  auto o = run_once(s, s.seed, registry);
  failed = !o.result.completed;
  std::vector<std::pair<double, std::string>> lines;
  for (const auto& e : o.result.trace) lines.emplace_back(e.t, "coordinator " + e.to_string());
  for (const auto& d : o.result.device_log) {
    lines.emplace_back(std::stod(d.substr(2, d.find(' ') - 2)), "device      " + d);
  }
  std::stable_sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  for (auto& [_, l] : lines) out.push_back(std::move(l));
  if (o.result.completed) {
    out.push_back("result " + o.result.job->aggregate.display + " makespan_s=" + fmt(o.result.job->makespan_s));
  } else {
    out.push_back("job failed");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Artifacts

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
}

inline std::string runs_csv(const std::vector<metrics::RunSummary>& runs) {
  std::string out = std::string(metrics::kCsvHeader) + "\n";
  for (const auto& r : runs) out += metrics::to_csv_row(r) + "\n";
  return out;
}

inline void write_report(const std::filesystem::path& dir, const Report& rep, const std::string& table_name,
                         bool with_summary) {
  std::filesystem::create_directories(dir);
  write_file(dir / "runs.csv", runs_csv(rep.runs));
  write_file(dir / table_name, rep.table);
  if (with_summary) write_file(dir / "summary.csv", summary_csv(rep.runs));
}

}  // namespace crowd::harness
