#pragma once

// Deterministic discrete-event simulation of one job on a simulated fleet.
// The real Coordinator runs unchanged; workers are modeled agents that
// execute workload slices (for real) and advance simulated time according to
// the execution-speed model. Events are ordered by
// (simulated time, source index, insertion sequence).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "crowd/coordinator.hpp"
#include "crowd/error.hpp"
#include "crowd/fleet.hpp"
#include "crowd/random.hpp"
#include "crowd/scheduler.hpp"
#include "crowd/transport.hpp"
#include "crowd/workloads.hpp"

namespace crowd::sim {

using coordinator::JobSpec;
using coordinator::TraceEntry;
using transport::Message;

/// Worker-side checkpoint costs: a one-time setup per task attempt plus a
/// fixed cost for every uploaded record.
struct OverheadModel {
  double checkpoint_setup_s = 2.0;
  double checkpoint_record_s = 0.02;
};

struct SimulationConfig {
  std::vector<fleet::DeviceProfile> fleet;
  fleet::TelemetryModel telemetry;
  double unit_scale = 1.0;
  transport::LinkModel link;
  coordinator::CoordinatorConfig coordinator;
  OverheadModel overheads;
  /// Explicit churn; when absent it is sampled from the profiles' churn rates.
  std::optional<std::vector<fleet::ChurnEvent>> churn_schedule;
  double churn_horizon_s = 3600.0;
  /// Workers register at t=0; the job arrives once they are connected.
  double submit_at_s = 1.0;
  double max_time_s = 1e7;
  std::string journal_path;
};

struct SimulationResult {
  bool completed = false;
  bool failed = false;
  std::optional<coordinator::JobResult> job;
  std::vector<TraceEntry> trace;
  /// Device-side happenings (going offline, flushing a result on reconnect...).
  std::vector<std::string> device_log;
  std::vector<std::uint32_t> accepted_commits_per_task;
  std::uint64_t rejected_commits = 0;
  std::uint64_t checkpoints_accepted = 0;
  std::uint64_t messages_delivered = 0;
  std::uint64_t messages_dropped = 0;
  double end_time_s = 0.0;
};

/// Time for one device to run the whole job locally, with no framework.
inline double single_device_seconds(const fleet::DeviceProfile& profile, const workloads::ResumableTask& workload,
                                    std::uint64_t total_work, const fleet::TelemetryModel& model = {},
                                    double unit_scale = 1.0) {
  const double rate = fleet::effective_throughput(profile, fleet::initial_snapshot(profile, model), unit_scale);
  if (!(rate > 0.0)) fail(ErrorCode::InvalidInput, profile.id + " has no spare capacity");
  return double(total_work) * workload.units_per_item() / rate;
}

inline double best_single_device_seconds(const std::vector<fleet::DeviceProfile>& fleet,
                                         const workloads::ResumableTask& workload, std::uint64_t total_work,
                                         const fleet::TelemetryModel& model = {}, double unit_scale = 1.0) {
  double best = INFINITY;
  for (const auto& p : fleet) best = std::min(best, single_device_seconds(p, workload, total_work, model, unit_scale));
  return best;
}

class Simulation {
 public:
  Simulation(SimulationConfig config, JobSpec job, const workloads::ResumableTask& workload,
             const scheduler::StrategyRegistry& registry = scheduler::StrategyRegistry())
      : config_(std::move(config)),
        job_(std::move(job)),
        workload_(workload),
        coordinator_(config_.coordinator, workload, registry.create(job_.strategy), make_rng(job_.seed, 1)) {
    fleet::validate_fleet(config_.fleet);
    config_.link.validate();
    job_.checkpoint.validate();
    if (!config_.journal_path.empty()) {
      coordinator_.attach_journal(std::make_shared<coordinator::Journal>(config_.journal_path));
    }
    for (std::size_t i = 0; i < config_.fleet.size(); ++i) {
      const auto& p = config_.fleet[i];
      workers_.push_back(Worker{p, fleet::initial_snapshot(p, config_.telemetry), make_rng(job_.seed, 100 + i),
                                transport::Outbox(p.id), transport::SimLink(config_.link, make_rng(job_.seed, 200 + i)),
                                transport::SimLink(config_.link, make_rng(job_.seed, 300 + i)), true, std::nullopt,
                                std::nullopt, 0});
    }
  }

  SimulationResult run() {
    for (std::size_t i = 0; i < workers_.size(); ++i) {
      announce(i, 0.0);
      schedule(config_.coordinator.heartbeat_interval_s, source_of(i), TelemetryTick{i});
    }
    schedule(config_.submit_at_s, kSystemSource, Submit{});

    std::vector<fleet::ChurnEvent> churn;
    if (config_.churn_schedule) {
      churn = *config_.churn_schedule;
    } else {
      Rng churn_rng = make_rng(job_.seed, 7);
      churn = fleet::sample_churn(config_.fleet, config_.churn_horizon_s, churn_rng);
    }
    for (const auto& c : churn) schedule(config_.submit_at_s + c.at_s, source_of(worker_index(c.worker_id)), Churn{c});

    double now = 0.0;
    while (!queue_.empty()) {
      Event ev = queue_.top();
      queue_.pop();
      now = ev.t;
      if (now > config_.max_time_s) break;
      std::visit([&](auto& what) { on(what, now); }, ev.what);
      if (coordinator_.failed() || coordinator_.finished()) break;
    }

    SimulationResult r;
    r.completed = coordinator_.finished();
    r.failed = !r.completed;
    if (r.completed) r.job = coordinator_.aggregate();
    r.trace = coordinator_.trace();
    r.device_log = std::move(device_log_);
    for (const auto& t : coordinator_.tasks()) r.accepted_commits_per_task.push_back(t.accepted_commits);
    r.rejected_commits = coordinator_.rejected_commits();
    r.checkpoints_accepted = coordinator_.accepted_checkpoints();
    r.messages_delivered = delivered_;
    r.messages_dropped = dropped_;
    r.end_time_s = now;
    return r;
  }

  const coordinator::Coordinator& coordinator() const noexcept { return coordinator_; }

 private:
  static constexpr std::uint32_t kSystemSource = 0;
  static constexpr std::size_t kToCoordinator = static_cast<std::size_t>(-1);

  struct Deliver {
    std::size_t to;
    Message msg;
  };
  struct TelemetryTick {
    std::size_t worker;
  };
  struct ChunkDone {
    std::size_t worker;
    std::uint64_t epoch;
    std::uint64_t items;
  };
  struct CoordinatorTick {};
  struct Submit {};
  struct Churn {
    fleet::ChurnEvent event;
  };

  struct Event {
    double t;
    std::uint32_t source;
    std::uint64_t seq;
    std::variant<Deliver, TelemetryTick, ChunkDone, CoordinatorTick, Submit, Churn> what;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return std::tie(a.t, a.source, a.seq) > std::tie(b.t, b.source, b.seq);
    }
  };

  struct RunningTask {
    std::uint64_t task_id;
    checkpoint::TaskState state;
    std::uint64_t epoch;
  };

  struct Worker {
    fleet::DeviceProfile profile;
    fleet::TelemetrySnapshot telemetry;
    Rng rng;
    transport::Outbox outbox;
    transport::SimLink up;
    transport::SimLink down;
    bool online = true;
    std::optional<RunningTask> task;
    std::optional<Message> buffered_commit;
    std::uint64_t epoch = 0;
  };

  static std::uint32_t source_of(std::size_t worker) { return std::uint32_t(worker + 1); }

  std::size_t worker_index(const std::string& id) const {
    for (std::size_t i = 0; i < workers_.size(); ++i) {
      if (workers_[i].profile.id == id) return i;
    }
    fail(ErrorCode::InvalidInput, "churn event names unknown worker '" + id + "'");
  }

  template <typename T>
  void schedule(double t, std::uint32_t source, T what) {
    queue_.push(Event{t, source, next_seq_++, std::move(what)});
  }

  void log_device(double t, const Worker& w, const std::string& what) {
    TraceEntry e{t, what, w.profile.id, w.task ? std::optional(w.task->task_id) : std::nullopt, ""};
    device_log_.push_back(e.to_string());
  }

  // -- wire ------------------------------------------------------------------

  void worker_send(std::size_t i, transport::Body body, double t) {
    auto& w = workers_[i];
    if (!w.online) return;
    Message msg = w.outbox.make(std::move(body));
    const auto d = w.up.send(t);
    if (!d.delivered) {
      ++dropped_;
      return;
    }
    schedule(d.at_s, source_of(i), Deliver{kToCoordinator, std::move(msg)});
  }

  void route(std::vector<coordinator::Outgoing> outgoing) {
    for (auto& o : outgoing) {
      const auto i = worker_index(o.to);
      const auto d = workers_[i].down.send(o.send_at_s);
      if (!d.delivered) {
        ++dropped_;
        continue;
      }
      schedule(d.at_s, kSystemSource, Deliver{i, std::move(o.msg)});
    }
  }

  transport::TelemetryBody telemetry_body(const Worker& w) const {
    const auto& s = w.telemetry;
    return {s.cpu_util, s.free_mem_gb, s.battery, s.latency_ms, s.thermal, s.timestamp_s};
  }

  void announce(std::size_t i, double t) {
    const auto& p = workers_[i].profile;
    worker_send(i, transport::RegisterBody{p.cores, p.freq_ghz, p.ram_gb}, t);
    worker_send(i, telemetry_body(workers_[i]), t);
  }

  void abandon(Worker& w) {
    ++w.epoch;
    w.task.reset();
  }

  // -- execution model -------------------------------------------------------

  double throughput(const Worker& w) const {
    const double nominal = double(w.profile.cores) * w.profile.freq_ghz * config_.unit_scale;
    // A saturated device still trickles along instead of stalling forever.
    return std::max(fleet::effective_throughput(w.profile, w.telemetry, config_.unit_scale), 1e-3 * nominal);
  }

  void plan_chunk(std::size_t i, double t0) {
    auto& w = workers_[i];
    const std::uint64_t remaining = workload_.remaining(w.task->state);
    const double rate = throughput(w);
    const double upi = workload_.units_per_item();
    std::uint64_t items = remaining;
    if (job_.checkpoint.enabled && remaining > 0) {
      const double fit = std::floor(rate * job_.checkpoint.interval_s / upi);
      items = std::clamp<std::uint64_t>(fit < 1.0 ? 1 : std::uint64_t(std::min(fit, 1e18)), 1, remaining);
    }
    const double duration = double(items) * upi / rate;
    schedule(t0 + duration, source_of(i), ChunkDone{i, w.task->epoch, items});
  }

  void start_task(std::size_t i, const transport::AssignTaskBody& body, double t) {
    auto& w = workers_[i];
    abandon(w);
    checkpoint::TaskState state =
        body.vars.empty() ? workload_.init(body.slice) : checkpoint::TaskState{body.vars, body.start_cursor};
    w.task = RunningTask{body.task_id, std::move(state), w.epoch};
    const double setup = job_.checkpoint.enabled ? config_.overheads.checkpoint_setup_s : 0.0;
    plan_chunk(i, t + setup);
  }

  // -- event handlers --------------------------------------------------------

  void on(Deliver& d, double t) {
    if (d.to == kToCoordinator) {
      ++delivered_;
      route(coordinator_.handle(d.msg, t));
      return;
    }
    auto& w = workers_[d.to];
    if (!w.online) {
      ++dropped_;
      return;
    }
    ++delivered_;
    switch (d.msg.type()) {
      case transport::MessageType::AssignTask: start_task(d.to, d.msg.as<transport::AssignTaskBody>(), t); break;
      case transport::MessageType::Reject: {
        const auto& rej = d.msg.as<transport::RejectBody>();
        if (!rej.task_id) {
          log_device(t, w, "re-register");
          abandon(w);
          announce(d.to, t);
        } else if (w.task && w.task->task_id == *rej.task_id) {
          log_device(t, w, "drop-stale-task");
          abandon(w);
        }
        break;
      }
      default: break;
    }
  }

  void on(TelemetryTick& tick, double t) {
    auto& w = workers_[tick.worker];
    const double dt = config_.coordinator.heartbeat_interval_s;
    w.telemetry = fleet::step_telemetry(w.profile, w.telemetry, dt, w.rng, config_.telemetry);
    if (w.online) {
      worker_send(tick.worker, transport::HeartbeatBody{w.task ? std::optional(w.task->task_id) : std::nullopt}, t);
      worker_send(tick.worker, telemetry_body(w), t);
    }
    schedule(t + dt, source_of(tick.worker), tick);
  }

  void on(ChunkDone& done, double t) {
    auto& w = workers_[done.worker];
    if (!w.task || w.task->epoch != done.epoch) return;
    if (done.items > 0) workload_.run_slice(w.task->state, done.items);

    if (workload_.remaining(w.task->state) == 0) {
      transport::CommitResultBody commit{w.task->task_id, workload_.finalize(w.task->state)};
      if (w.online) {
        worker_send(done.worker, std::move(commit), t);
      } else {
        log_device(t, w, "finished-offline");
        w.buffered_commit = w.outbox.make(std::move(commit));
      }
      abandon(w);
      return;
    }
    double next = t;
    if (w.online) {
      worker_send(done.worker, transport::CheckpointUploadBody{w.task->task_id, w.task->state.cursor, w.task->state.vars},
                  t);
      next += config_.overheads.checkpoint_record_s;
    }
    plan_chunk(done.worker, next);
  }

  void on(CoordinatorTick&, double t) {
    route(coordinator_.tick(t));
    schedule(t + config_.coordinator.heartbeat_interval_s, kSystemSource, CoordinatorTick{});
  }

  void on(Submit&, double t) {
    route(coordinator_.submit(job_, t));
    schedule(t + config_.coordinator.heartbeat_interval_s, kSystemSource, CoordinatorTick{});
  }

  void on(Churn& c, double t) {
    const auto i = worker_index(c.event.worker_id);
    auto& w = workers_[i];
    if (c.event.kind == fleet::ChurnKind::Disconnect) {
      if (!w.online) return;
      w.online = false;
      log_device(t, w, "offline");
      return;
    }
    if (w.online) return;
    w.online = true;
    log_device(t, w, "online");
    if (w.buffered_commit) {
      // Results finished while offline are still offered; the coordinator decides.
      Message msg = std::move(*w.buffered_commit);
      w.buffered_commit.reset();
      const auto d = w.up.send(t);
      if (d.delivered) {
        schedule(d.at_s, source_of(i), Deliver{kToCoordinator, std::move(msg)});
      } else {
        ++dropped_;
      }
    }
    abandon(w);
    announce(i, t);
  }

  SimulationConfig config_;
  JobSpec job_;
  const workloads::ResumableTask& workload_;
  coordinator::Coordinator coordinator_;
  std::vector<Worker> workers_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
  std::vector<std::string> device_log_;
};

inline SimulationResult simulate(const SimulationConfig& config, const JobSpec& job,
                                 const workloads::ResumableTask& workload,
                                 const scheduler::StrategyRegistry& registry = scheduler::StrategyRegistry()) {
  Simulation sim(config, job, workload, registry);
  return sim.run();
}

}  // namespace crowd::sim
