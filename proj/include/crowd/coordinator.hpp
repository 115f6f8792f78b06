#pragma once

// The control plane. Owns every piece of durable state: task records,
// checkpoint chains and the worker registry. Workers are stateless and only
// ever talk to the coordinator through messages; the coordinator is a single
// serial state machine fed by `handle` and `tick`.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "crowd/checkpoint.hpp"
#include "crowd/error.hpp"
#include "crowd/fleet.hpp"
#include "crowd/random.hpp"
#include "crowd/scheduler.hpp"
#include "crowd/transport.hpp"
#include "crowd/workloads.hpp"

namespace crowd::coordinator {

using checkpoint::CheckpointChain;
using checkpoint::CheckpointPolicy;
using checkpoint::TaskState;
using transport::Message;

inline const std::string kCoordinatorId = "coordinator";

struct JobSpec {
  std::string job_id = "job";
  std::string workload = "montecarlo";
  std::uint64_t total_work = 1;
  std::uint64_t task_count = 1;
  std::string strategy = "wrr";
  CheckpointPolicy checkpoint{5.0, 50, false};
  std::uint64_t seed = 1;
};

enum class TaskStatus { Pending, Assigned, Running, Orphaned, Completed, Failed };

inline std::string_view to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::Pending: return "pending";
    case TaskStatus::Assigned: return "assigned";
    case TaskStatus::Running: return "running";
    case TaskStatus::Orphaned: return "orphaned";
    case TaskStatus::Completed: return "completed";
    case TaskStatus::Failed: return "failed";
  }
  return "?";
}

struct TaskRecord {
  std::uint64_t task_id = 0;
  std::string job_id;
  workloads::SliceParams params;
  TaskStatus state = TaskStatus::Pending;
  std::optional<std::string> owner;
  std::uint32_t attempts = 0;
  CheckpointChain chain;
  std::optional<std::string> result;

  double assigned_at_s = 0.0;
  double dispatched_at_s = 0.0;
  double completed_at_s = 0.0;
  std::uint32_t accepted_commits = 0;

  bool active() const { return state == TaskStatus::Assigned || state == TaskStatus::Running; }
};

/// Contiguous slices whose sizes differ by at most one.
inline std::vector<TaskRecord> decompose(const JobSpec& job) {
  if (job.task_count < 1) fail(ErrorCode::InvalidJob, "task_count must be >= 1");
  if (job.total_work < 1) fail(ErrorCode::InvalidJob, "total_work must be >= 1");
  if (job.task_count > job.total_work) {
    fail(ErrorCode::InvalidJob, "task_count " + std::to_string(job.task_count) + " exceeds total_work " +
                                    std::to_string(job.total_work));
  }
  std::vector<TaskRecord> tasks;
  tasks.reserve(job.task_count);
  const std::uint64_t base = job.total_work / job.task_count;
  const std::uint64_t extra = job.total_work % job.task_count;
  std::uint64_t begin = 0;
  for (std::uint64_t i = 0; i < job.task_count; ++i) {
    TaskRecord t;
    t.task_id = i;
    t.job_id = job.job_id;
    t.params.index = i;
    t.params.begin = begin;
    t.params.size = base + (i < extra ? 1 : 0);
    t.params.seed = workloads::slice_seed(job.seed, i);
    t.chain = CheckpointChain(i, job.checkpoint);
    begin += t.params.size;
    tasks.push_back(std::move(t));
  }
  return tasks;
}

enum class WorkerStatus { Connected, Disconnected };

struct WorkerEntry {
  std::string worker_id;
  fleet::DeviceProfile profile;
  WorkerStatus status = WorkerStatus::Connected;
  double last_heartbeat_s = 0.0;
  fleet::TelemetrySnapshot telemetry;
  std::optional<std::uint64_t> current_task;
  /// Static mode only: tasks pre-assigned to this worker, in drain order.
  std::deque<std::uint64_t> queue;
};

struct CoordinatorConfig {
  double heartbeat_interval_s = 2.0;
  double heartbeat_timeout_s = 6.0;
  std::uint32_t max_attempts = 5;
  double job_overhead_s = 0.4;
  double dispatch_overhead_s = 0.05;
  /// An assignment the worker still does not report after this long is treated as lost.
  double assignment_grace_s = 6.0;
};

enum class CommitOutcome { Accepted, RejectedStale };

struct TraceEntry {
  double t = 0.0;
  std::string kind;
  std::string worker;
  std::optional<std::uint64_t> task;
  std::string detail;

  std::string to_string() const {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    os << "t=" << t << ' ' << kind;
    if (!worker.empty()) os << " worker=" << worker;
    if (task) os << " task=" << *task;
    if (!detail.empty()) os << ' ' << detail;
    return os.str();
  }

  bool operator==(const TraceEntry&) const = default;
};

struct JobResult {
  std::string job_id;
  workloads::Aggregate aggregate;
  double makespan_s = 0.0;
  /// Keyed by worker id, in registration order.
  std::vector<std::pair<std::string, std::uint64_t>> tasks_per_worker;
  std::vector<std::pair<std::string, double>> busy_s_per_worker;
};

/// A message the coordinator wants sent, and when it leaves the coordinator.
struct Outgoing {
  std::string to;
  Message msg;
  double send_at_s = 0.0;
};

/// Append-only journal of task transitions and checkpoint records, one
/// length-prefixed JSON frame per entry.
class Journal {
 public:
  explicit Journal(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) fail(ErrorCode::IoError, "cannot open journal " + path);
  }

  void append(const nlohmann::json& entry) {
    out_ << transport::frame_payload(entry.dump());
    out_.flush();
  }

  static std::vector<nlohmann::json> read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open journal " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    transport::FrameReader reader;
    reader.feed(data);
    std::vector<nlohmann::json> out;
    while (auto payload = reader.next_payload()) out.push_back(nlohmann::json::parse(*payload));
    if (reader.buffered() != 0) fail(ErrorCode::FrameError, "journal ends with a truncated frame");
    return out;
  }

  /// Rebuilds each task's chain from journaled checkpoint records. A full
  /// record supersedes everything journaled before it.
  static std::map<std::uint64_t, CheckpointChain> rebuild_chains(const std::vector<nlohmann::json>& entries,
                                                                 const CheckpointPolicy& policy) {
    std::map<std::uint64_t, std::vector<checkpoint::CheckpointRecord>> records;
    for (const auto& e : entries) {
      if (e.value("kind", "") != "checkpoint") continue;
      auto r = checkpoint::record_from_json(e.at("record"));
      auto& list = records[r.task_id];
      if (r.is_full()) list.clear();
      list.push_back(std::move(r));
    }
    std::map<std::uint64_t, CheckpointChain> chains;
    for (auto& [task, list] : records) {
      chains.emplace(task, CheckpointChain::from_records(task, policy, std::move(list)));
    }
    return chains;
  }

 private:
  std::ofstream out_;
};

class Coordinator {
 public:
  Coordinator(CoordinatorConfig config, const workloads::ResumableTask& workload,
              std::unique_ptr<scheduler::Strategy> strategy, Rng rng = Rng(1))
      : config_(config), workload_(workload), strategy_(std::move(strategy)), rng_(std::move(rng)) {
    if (!strategy_) fail(ErrorCode::InvalidInput, "coordinator needs a strategy");
  }

  void attach_journal(std::shared_ptr<Journal> journal) { journal_ = std::move(journal); }

  // -- queries ---------------------------------------------------------------

  const CoordinatorConfig& config() const noexcept { return config_; }
  scheduler::DispatchMode mode() const { return strategy_->mode(); }
  const std::vector<TraceEntry>& trace() const noexcept { return trace_; }
  const std::vector<TaskRecord>& tasks() const noexcept { return tasks_; }
  const TaskRecord& task(std::uint64_t id) const { return tasks_.at(id); }
  bool has_worker(const std::string& id) const { return index_.count(id) != 0; }
  const WorkerEntry& worker(const std::string& id) const { return workers_.at(index_.at(id)); }
  const std::vector<WorkerEntry>& workers() const noexcept { return workers_; }
  bool submitted() const noexcept { return submitted_; }
  double submitted_at() const noexcept { return submitted_at_; }
  bool failed() const noexcept { return failed_; }
  bool finished() const noexcept { return submitted_ && completed_ == tasks_.size(); }
  std::size_t completed_count() const noexcept { return completed_; }
  std::uint64_t rejected_commits() const noexcept { return rejected_commits_; }
  std::uint64_t accepted_checkpoints() const noexcept { return accepted_checkpoints_; }

  // -- job submission --------------------------------------------------------

  std::vector<Outgoing> submit(const JobSpec& job, double now) {
    if (submitted_) fail(ErrorCode::InvalidJob, "a job has already been submitted");
    tasks_ = decompose(job);
    job_ = job;
    submitted_ = true;
    submitted_at_ = now;
    coordinator_free_at_ = now + config_.job_overhead_s;
    note(now, "submit", "", std::nullopt,
         "tasks=" + std::to_string(tasks_.size()) + " strategy=" + strategy_->name());
    if (mode() == scheduler::DispatchMode::Static) {
      for (auto& t : tasks_) unplaced_.push_back(t.task_id);
      place_static(now);
    } else {
      for (auto& t : tasks_) pending_.push_back(t.task_id);
    }
    return dispatch(now);
  }

  // -- message handling ------------------------------------------------------

  std::vector<Outgoing> handle(const Message& msg, double now) {
    out_.clear();
    try {
      switch (msg.type()) {
        case transport::MessageType::Register: on_register(msg, now); break;
        case transport::MessageType::Heartbeat: on_heartbeat(msg, now, nullptr); break;
        case transport::MessageType::Telemetry: on_heartbeat(msg, now, &msg.as<transport::TelemetryBody>()); break;
        case transport::MessageType::CheckpointUpload: on_checkpoint(msg, now); break;
        case transport::MessageType::CommitResult: on_commit(msg, now); break;
        case transport::MessageType::DisconnectNotice: on_disconnect_notice(msg, now); break;
        default:
          fail(ErrorCode::ProtocolError, "coordinator does not accept " + std::string(to_string(msg.type())));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ProtocolError && e.code() != ErrorCode::StaleState) throw;
      note(now, "protocol_error", msg.sender, std::nullopt, e.what());
      reply(msg, now, transport::RejectBody{msg.seq, e.what(), std::nullopt});
    }
    auto sent = std::move(out_);
    out_.clear();
    auto more = dispatch(now);
    sent.insert(sent.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    return sent;
  }

  /// Heartbeat-timeout sweep followed by a dispatch pass.
  std::vector<Outgoing> tick(double now) {
    for (auto& w : workers_) {
      if (w.status == WorkerStatus::Connected && now - w.last_heartbeat_s > config_.heartbeat_timeout_s) {
        note(now, "timeout", w.worker_id, std::nullopt, "");
        disconnect(w, now);
      }
    }
    return dispatch(now);
  }

  // -- operations --------------------------------------------------------------

  /// Accepts a result only from the task's current owner while the task is in
  /// flight. Everything else is stale and leaves state untouched.
  CommitOutcome commit_result(std::uint64_t task_id, const std::string& worker_id, const std::string& payload,
                              double now) {
    auto& t = task_ref(task_id);
    if (!t.active() || t.owner != worker_id) {
      ++rejected_commits_;
      note(now, "commit_rejected", worker_id, task_id, "state=" + std::string(to_string(t.state)));
      return CommitOutcome::RejectedStale;
    }
    t.state = TaskStatus::Completed;
    t.result = payload;
    t.owner.reset();
    t.completed_at_s = now;
    ++t.accepted_commits;
    ++completed_;
    last_completion_s_ = std::max(last_completion_s_, now);
    if (auto* w = find_worker(worker_id)) {
      w->current_task.reset();
      tasks_done_[worker_id] += 1;
      busy_s_[worker_id] += now - t.assigned_at_s;
    }
    note(now, "commit", worker_id, task_id, "");
    journal_task(t);
    return CommitOutcome::Accepted;
  }

  /// Appends `state` to the task's chain if `worker_id` owns the task.
  /// Throws StaleState (chain unchanged) on a cursor regression.
  CommitOutcome record_checkpoint(std::uint64_t task_id, const std::string& worker_id, const TaskState& state,
                                  double now) {
    auto& t = task_ref(task_id);
    if (!t.active() || t.owner != worker_id) {
      note(now, "checkpoint_rejected", worker_id, task_id, "");
      return CommitOutcome::RejectedStale;
    }
    const auto* record = t.chain.append(state, now);
    if (t.state == TaskStatus::Assigned) t.state = TaskStatus::Running;
    if (record) {
      ++accepted_checkpoints_;
      if (journal_) journal_->append({{"kind", "checkpoint"}, {"record", checkpoint::to_json(*record)}});
    }
    return CommitOutcome::Accepted;
  }

  /// Matches dispatchable tasks with idle connected workers. Each match moves
  /// the task to Assigned with its owner set in the same step.
  std::vector<Outgoing> dispatch(double now) {
    std::vector<Outgoing> sent;
    if (!submitted_ || failed_) return sent;
    if (mode() == scheduler::DispatchMode::Static) {
      place_static(now);
      for (auto& w : workers_) {
        if (w.status != WorkerStatus::Connected || w.current_task || w.queue.empty()) continue;
        const auto task_id = w.queue.front();
        w.queue.pop_front();
        if (!assign(task_id, w, now, sent)) return sent;
      }
      return sent;
    }

    while (!orphans_.empty() || !pending_.empty()) {
      std::vector<scheduler::Candidate> candidates;
      for (const auto& w : workers_) {
        if (w.status == WorkerStatus::Connected && !w.current_task) candidates.push_back({w.profile, w.telemetry});
      }
      if (candidates.empty()) break;
      auto& queue = orphans_.empty() ? pending_ : orphans_;
      const auto task_id = queue.front();
      queue.pop_front();
      const auto chosen = scheduler::select_worker(*strategy_, candidates, rng_);
      if (!assign(task_id, workers_[index_.at(chosen)], now, sent)) break;
    }
    return sent;
  }

  JobResult aggregate() const {
    if (!finished()) {
      fail(ErrorCode::JobNotFinished, std::to_string(completed_) + " of " + std::to_string(tasks_.size()) +
                                          " tasks completed");
    }
    std::vector<std::string> results;
    results.reserve(tasks_.size());
    for (const auto& t : tasks_) results.push_back(*t.result);
    JobResult r;
    r.job_id = job_.job_id;
    r.aggregate = workload_.fold(results);
    r.makespan_s = last_completion_s_ - submitted_at_;
    for (const auto& w : workers_) {
      auto count = tasks_done_.find(w.worker_id);
      auto busy = busy_s_.find(w.worker_id);
      r.tasks_per_worker.emplace_back(w.worker_id, count == tasks_done_.end() ? 0 : count->second);
      r.busy_s_per_worker.emplace_back(w.worker_id, busy == busy_s_.end() ? 0.0 : busy->second);
    }
    return r;
  }

 private:
  TaskRecord& task_ref(std::uint64_t id) {
    if (id >= tasks_.size()) fail(ErrorCode::ProtocolError, "unknown task " + std::to_string(id));
    return tasks_[id];
  }

  WorkerEntry* find_worker(const std::string& id) {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &workers_[it->second];
  }

  WorkerEntry& connected_sender(const Message& msg) {
    auto* w = find_worker(msg.sender);
    if (!w || w->status != WorkerStatus::Connected) {
      fail(ErrorCode::ProtocolError, "worker '" + msg.sender + "' is not registered");
    }
    return *w;
  }

  void note(double t, std::string kind, std::string worker, std::optional<std::uint64_t> task, std::string detail) {
    trace_.push_back({t, std::move(kind), std::move(worker), task, std::move(detail)});
  }

  void reply(const Message& to, double now, transport::Body body) {
    out_.push_back({to.sender, outbox_.make(std::move(body)), now});
  }

  void journal_task(const TaskRecord& t) {
    if (!journal_) return;
    journal_->append({{"kind", "task"},
                      {"task_id", t.task_id},
                      {"state", std::string(to_string(t.state))},
                      {"owner", t.owner.value_or("")},
                      {"attempts", t.attempts}});
  }

  void on_register(const Message& msg, double now) {
    const auto& body = msg.as<transport::RegisterBody>();
    fleet::DeviceProfile profile;
    profile.id = msg.sender;
    profile.cores = body.cores;
    profile.freq_ghz = body.freq_ghz;
    profile.ram_gb = body.ram_gb;
    try {
      fleet::validate(profile);
    } catch (const Error& e) {
      fail(ErrorCode::ProtocolError, e.what());
    }

    if (auto* known = find_worker(msg.sender)) {
      // A re-registering worker has dropped whatever it was running.
      release_tasks(*known, now);
      known->profile = profile;
      known->status = WorkerStatus::Connected;
      known->last_heartbeat_s = now;
      note(now, "reconnect", known->worker_id, std::nullopt, "");
    } else {
      WorkerEntry w;
      w.worker_id = msg.sender;
      w.profile = profile;
      w.last_heartbeat_s = now;
      w.telemetry = fleet::initial_snapshot(profile);
      w.telemetry.cpu_util = 0.0;
      w.telemetry.thermal = 0.0;
      w.telemetry.timestamp_s = now;
      index_.emplace(w.worker_id, workers_.size());
      workers_.push_back(std::move(w));
      note(now, "register", msg.sender, std::nullopt, "");
    }
    reply(msg, now, transport::AckBody{msg.seq, std::nullopt});
  }

  void on_heartbeat(const Message& msg, double now, const transport::TelemetryBody* telemetry) {
    auto& w = connected_sender(msg);
    w.last_heartbeat_s = now;
    if (telemetry) {
      w.telemetry.cpu_util = telemetry->cpu_util;
      w.telemetry.free_mem_gb = telemetry->free_mem_gb;
      w.telemetry.battery = telemetry->battery;
      w.telemetry.latency_ms = telemetry->latency_ms;
      w.telemetry.thermal = telemetry->thermal;
      w.telemetry.timestamp_s = telemetry->timestamp_s;
      return;
    }
    // Heartbeats report the worker's current task; an assignment it never
    // picked up (lost message) is released after a grace period.
    const auto& hb = msg.as<transport::HeartbeatBody>();
    if (w.current_task && hb.task_id != w.current_task) {
      const auto& t = tasks_[*w.current_task];
      if (now - t.dispatched_at_s > config_.assignment_grace_s) {
        note(now, "lost_assignment", w.worker_id, t.task_id, "");
        release_tasks(w, now);
      }
    }
  }

  void on_checkpoint(const Message& msg, double now) {
    const auto& body = msg.as<transport::CheckpointUploadBody>();
    const auto outcome = record_checkpoint(body.task_id, msg.sender, TaskState{body.vars, body.cursor}, now);
    if (outcome == CommitOutcome::Accepted) {
      reply(msg, now, transport::AckBody{msg.seq, body.task_id});
    } else {
      reply(msg, now, transport::RejectBody{msg.seq, "stale", body.task_id});
    }
  }

  void on_commit(const Message& msg, double now) {
    const auto& body = msg.as<transport::CommitResultBody>();
    const auto outcome = commit_result(body.task_id, msg.sender, body.result, now);
    if (outcome == CommitOutcome::Accepted) {
      reply(msg, now, transport::AckBody{msg.seq, body.task_id});
    } else {
      reply(msg, now, transport::RejectBody{msg.seq, "stale", body.task_id});
    }
  }

  void on_disconnect_notice(const Message& msg, double now) {
    auto* w = find_worker(msg.sender);
    if (!w) fail(ErrorCode::ProtocolError, "disconnect from unknown worker '" + msg.sender + "'");
    if (w->status == WorkerStatus::Disconnected) return;
    note(now, "disconnect", w->worker_id, std::nullopt, "");
    disconnect(*w, now);
  }

  void disconnect(WorkerEntry& w, double now) {
    w.status = WorkerStatus::Disconnected;
    release_tasks(w, now);
  }

  /// Orphans the worker's in-flight task and, in static mode, hands its queue back for re-placement.
  void release_tasks(WorkerEntry& w, double now) {
    if (w.current_task) {
      auto& t = tasks_[*w.current_task];
      w.current_task.reset();
      if (t.active() && t.owner == w.worker_id) {
        t.state = TaskStatus::Orphaned;
        t.owner.reset();
        note(now, "orphan", w.worker_id, t.task_id, "cursor=" + std::to_string(resume_cursor(t)));
        journal_task(t);
        if (mode() == scheduler::DispatchMode::Static) {
          unplaced_orphans_.push_back(t.task_id);
        } else {
          orphans_.push_back(t.task_id);
        }
      }
    }
    if (mode() == scheduler::DispatchMode::Static && w.status == WorkerStatus::Disconnected) {
      for (auto id : w.queue) unplaced_.push_back(id);
      w.queue.clear();
    }
  }

  std::uint64_t resume_cursor(const TaskRecord& t) const { return t.chain.empty() ? 0 : t.chain.recover().cursor; }

  /// Static mode: distributes unplaced tasks over connected workers by rotation.
  /// Orphans jump to the front of their new queue.
  void place_static(double now) {
    std::vector<scheduler::Candidate> candidates;
    for (const auto& w : workers_) {
      if (w.status == WorkerStatus::Connected) candidates.push_back({w.profile, w.telemetry});
    }
    if (candidates.empty()) return;
    while (!unplaced_orphans_.empty()) {
      const auto id = unplaced_orphans_.front();
      unplaced_orphans_.pop_front();
      auto& w = workers_[index_.at(scheduler::select_worker(*strategy_, candidates, rng_))];
      w.queue.push_front(id);
      note(now, "queue", w.worker_id, id, "front");
    }
    while (!unplaced_.empty()) {
      const auto id = unplaced_.front();
      unplaced_.pop_front();
      auto& w = workers_[index_.at(scheduler::select_worker(*strategy_, candidates, rng_))];
      w.queue.push_back(id);
      note(now, "queue", w.worker_id, id, "");
    }
  }

  bool assign(std::uint64_t task_id, WorkerEntry& w, double now, std::vector<Outgoing>& sent) {
    auto& t = tasks_[task_id];
    if (t.attempts >= config_.max_attempts) {
      t.state = TaskStatus::Failed;
      failed_ = true;
      note(now, "failed", "", task_id, "attempts=" + std::to_string(t.attempts));
      journal_task(t);
      return false;
    }
    ++t.attempts;
    t.state = TaskStatus::Assigned;
    t.owner = w.worker_id;
    t.assigned_at_s = now;
    w.current_task = task_id;

    transport::AssignTaskBody body;
    body.task_id = task_id;
    body.slice = t.params;
    if (!t.chain.empty()) {
      const auto state = t.chain.recover();
      body.start_cursor = state.cursor;
      body.vars = state.vars;
    }
    coordinator_free_at_ = std::max(coordinator_free_at_, now) + config_.dispatch_overhead_s;
    t.dispatched_at_s = coordinator_free_at_;
    note(now, "assign", w.worker_id, task_id,
         "attempt=" + std::to_string(t.attempts) + " cursor=" + std::to_string(body.start_cursor));
    journal_task(t);
    sent.push_back({w.worker_id, outbox_.make(std::move(body)), coordinator_free_at_});
    return true;
  }

  CoordinatorConfig config_;
  const workloads::ResumableTask& workload_;
  std::unique_ptr<scheduler::Strategy> strategy_;
  Rng rng_;
  std::shared_ptr<Journal> journal_;
  transport::Outbox outbox_{kCoordinatorId};

  JobSpec job_;
  bool submitted_ = false;
  bool failed_ = false;
  double submitted_at_ = 0.0;
  double coordinator_free_at_ = 0.0;
  double last_completion_s_ = 0.0;
  std::size_t completed_ = 0;
  std::uint64_t rejected_commits_ = 0;
  std::uint64_t accepted_checkpoints_ = 0;

  std::vector<TaskRecord> tasks_;
  std::vector<WorkerEntry> workers_;
  std::map<std::string, std::size_t> index_;
  std::deque<std::uint64_t> pending_;
  std::deque<std::uint64_t> orphans_;
  std::deque<std::uint64_t> unplaced_;
  std::deque<std::uint64_t> unplaced_orphans_;
  std::map<std::string, std::uint64_t> tasks_done_;
  std::map<std::string, double> busy_s_;

  std::vector<Outgoing> out_;
  std::vector<TraceEntry> trace_;
};

/// Scheduling decisions grouped per worker with timestamps dropped. Two runs
/// whose channels only differ in latency produce equal projections.
inline std::map<std::string, std::vector<std::string>> decisions_by_worker(const std::vector<TraceEntry>& trace) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& e : trace) {
    if (e.kind != "queue" && e.kind != "assign" && e.kind != "commit") continue;
    TraceEntry copy = e;
    copy.t = 0.0;
    out[e.worker].push_back(copy.to_string().substr(std::string("t=0.000000 ").size()));
  }
  return out;
}

}  // namespace crowd::coordinator
