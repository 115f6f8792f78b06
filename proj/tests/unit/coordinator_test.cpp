#include <gtest/gtest.h>

#include "crowd/coordinator.hpp"
#include "support/expect.hpp"

using namespace crowd;
using namespace crowd::coordinator;
using transport::Message;

namespace {

JobSpec job(std::uint64_t total, std::uint64_t tasks) {
  JobSpec j;
  j.total_work = total;
  j.task_count = tasks;
  return j;
}

struct Harness {
  workloads::MonteCarloE workload{1e-5};
  Coordinator c;
  std::map<std::string, transport::Outbox> boxes;

  explicit Harness(const std::string& strategy)
      : c(CoordinatorConfig{}, workload, scheduler::StrategyRegistry().create(strategy)) {}

  Message from(const std::string& id, transport::Body body) {
    return boxes.try_emplace(id, id).first->second.make(std::move(body));
  }
  std::vector<Outgoing> reg(const std::string& id, int cores = 8, double freq = 2.0, double now = 0.0) {
    return c.handle(from(id, transport::RegisterBody{cores, freq, 4.0}), now);
  }
  std::vector<Outgoing> drop(const std::string& id, double now) {
    return c.handle(from(id, transport::DisconnectNoticeBody{}), now);
  }
  /// Runs a task to completion in-process and returns the finalized result.
  std::string result_of(std::uint64_t task_id) {
    auto s = workload.init(c.task(task_id).params);
    workload.run_slice(s, c.task(task_id).params.size);
    return workload.finalize(s);
  }
};

std::vector<std::uint64_t> assigned_ids(const std::vector<Outgoing>& out) {
  std::vector<std::uint64_t> ids;
  for (const auto& o : out) {
    if (o.msg.type() == transport::MessageType::AssignTask) ids.push_back(o.msg.as<transport::AssignTaskBody>().task_id);
  }
  return ids;
}

}  // namespace

TEST(Decompose, EvenSplit) {
  const auto t = decompose(job(100, 4));
  ASSERT_EQ(t.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(t[i].params.size, 25u);
    EXPECT_EQ(t[i].params.begin, 25u * i);
    EXPECT_EQ(t[i].state, TaskStatus::Pending);
    EXPECT_FALSE(t[i].owner);
    EXPECT_EQ(t[i].attempts, 0u);
  }
}

TEST(Decompose, RemainderSpread) {
  const auto t = decompose(job(10, 3));
  EXPECT_EQ(t[0].params.size, 4u);
  EXPECT_EQ(t[1].params.size, 3u);
  EXPECT_EQ(t[2].params.size, 3u);
  EXPECT_EQ(decompose(job(1, 1))[0].params.size, 1u);
}

TEST(Decompose, ConservesWork) {
  for (std::uint64_t total : {7u, 100u, 1001u}) {
    for (std::uint64_t n : {1u, 3u, 7u}) {
      std::uint64_t sum = 0, lo = total, hi = 0;
      for (const auto& t : decompose(job(total, n))) {
        sum += t.params.size;
        lo = std::min(lo, t.params.size);
        hi = std::max(hi, t.params.size);
      }
      EXPECT_EQ(sum, total);
      EXPECT_LE(hi - lo, 1u);
    }
  }
  EXPECT_CROWD_ERROR(decompose(job(3, 4)), ErrorCode::InvalidJob);
  EXPECT_CROWD_ERROR(decompose(job(3, 0)), ErrorCode::InvalidJob);
}

TEST(Coordinator, StaticRotationPrePlacesTwelveTasks) {
  Harness h("fifo");
  for (int i = 1; i <= 6; ++i) h.reg("w" + std::to_string(i));
  h.c.submit(job(1200, 12), 1.0);
  std::vector<std::string> placed;
  for (const auto& e : h.c.trace()) {
    if (e.kind == "queue") placed.push_back(e.worker);
  }
  ASSERT_EQ(placed.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(placed[i], "w" + std::to_string(i % 6 + 1));
}

TEST(Coordinator, DynamicDispatchPicksDominantWorker) {
  Harness h("edas");
  h.reg("slow", 2, 1.0);
  h.reg("fast", 8, 2.4);
  h.c.handle(h.from("slow", transport::TelemetryBody{0.9, 0.5, 0.2, 90, 0.9, 0.1}), 0.1);
  h.c.handle(h.from("fast", transport::TelemetryBody{0.1, 3.0, 0.9, 15, 0.1, 0.1}), 0.1);
  const auto out = h.c.submit(job(10, 1), 1.0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].to, "fast");
  EXPECT_EQ(h.c.task(0).owner, "fast");
  EXPECT_EQ(h.c.task(0).state, TaskStatus::Assigned);
}

TEST(Coordinator, DispatchOverheadSerializesAssignments) {
  Harness h("wrr");
  h.reg("a");
  h.reg("b");
  const auto out = h.c.submit(job(10, 2), 1.0);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out[0].send_at_s, 1.0 + 0.4 + 0.05);
  EXPECT_DOUBLE_EQ(out[1].send_at_s, 1.0 + 0.4 + 0.10);
}

TEST(Coordinator, DisconnectOrphansAndResumesFromCheckpoint) {
  Harness h("wrr");
  h.reg("a");
  h.reg("b");
  auto j = job(2000, 2);
  j.checkpoint.enabled = true;
  h.c.submit(j, 1.0);
  const std::string owner0 = *h.c.task(0).owner;
  const std::string other = owner0 == "a" ? "b" : "a";

  // The owner checkpoints 700 of its 1000 trials, then drops.
  auto s = h.workload.init(h.c.task(0).params);
  h.workload.run_slice(s, 700);
  h.c.handle(h.from(owner0, transport::CheckpointUploadBody{0, s.cursor, s.vars}), 2.0);
  EXPECT_EQ(h.c.task(0).state, TaskStatus::Running);
  h.drop(owner0, 3.0);
  EXPECT_EQ(h.c.task(0).state, TaskStatus::Orphaned);
  EXPECT_FALSE(h.c.task(0).owner);

  // The survivor finishes its own task and then picks the orphan up at 700.
  const auto other_task = *h.c.worker(other).current_task;
  const auto out = h.c.handle(h.from(other, transport::CommitResultBody{other_task, h.result_of(other_task)}), 4.0);
  ASSERT_EQ(assigned_ids(out), std::vector<std::uint64_t>{0});
  for (const auto& o : out) {
    if (o.msg.type() == transport::MessageType::AssignTask) {
      EXPECT_EQ(o.to, other);
      EXPECT_EQ(o.msg.as<transport::AssignTaskBody>().start_cursor, 700u);
      EXPECT_EQ(o.msg.as<transport::AssignTaskBody>().vars, s.vars);
    }
  }
  EXPECT_EQ(h.c.task(0).attempts, 2u);
}

TEST(Coordinator, ReconnectKeepsResumedOwner) {
  Harness h("wrr");
  h.reg("a");
  h.reg("b");
  h.c.submit(job(10, 1), 1.0);
  const std::string first = *h.c.task(0).owner;
  const std::string second = first == "a" ? "b" : "a";
  h.drop(first, 2.0);
  EXPECT_EQ(h.c.task(0).owner, second);
  h.reg(first, 8, 2.0, 5.0);
  EXPECT_EQ(h.c.worker(first).status, WorkerStatus::Connected);
  EXPECT_EQ(h.c.task(0).owner, second);
}

TEST(Coordinator, StaleCommitsAreRejected) {
  Harness h("wrr");
  h.reg("a");
  h.reg("b");
  h.c.submit(job(10, 1), 1.0);
  const std::string first = *h.c.task(0).owner;
  const std::string second = first == "a" ? "b" : "a";
  const auto result = h.result_of(0);
  h.drop(first, 2.0);
  EXPECT_EQ(h.c.commit_result(0, second, result, 3.0), CommitOutcome::Accepted);
  EXPECT_EQ(h.c.task(0).state, TaskStatus::Completed);
  // The former owner comes back and commits too; then the owner repeats itself.
  h.reg(first, 8, 2.0, 4.0);
  EXPECT_EQ(h.c.commit_result(0, first, result, 4.5), CommitOutcome::RejectedStale);
  EXPECT_EQ(h.c.commit_result(0, second, result, 5.0), CommitOutcome::RejectedStale);
  EXPECT_EQ(h.c.task(0).accepted_commits, 1u);
  EXPECT_EQ(h.c.rejected_commits(), 2u);
  EXPECT_CROWD_ERROR(h.c.commit_result(9, first, result, 6.0), ErrorCode::ProtocolError);
}

TEST(Coordinator, CheckpointOwnershipGate) {
  Harness h("wrr");
  h.reg("a");
  h.reg("b");
  auto j = job(100, 1);
  j.checkpoint.enabled = true;
  h.c.submit(j, 1.0);
  const std::string owner = *h.c.task(0).owner;
  const std::string other = owner == "a" ? "b" : "a";
  auto s = h.workload.init(h.c.task(0).params);
  h.workload.run_slice(s, 50);
  EXPECT_EQ(h.c.record_checkpoint(0, owner, s, 2.0), CommitOutcome::Accepted);
  EXPECT_EQ(h.c.task(0).chain.size(), 1u);
  EXPECT_EQ(h.c.record_checkpoint(0, other, s, 2.0), CommitOutcome::RejectedStale);
  auto older = h.workload.init(h.c.task(0).params);
  h.workload.run_slice(older, 10);
  EXPECT_CROWD_ERROR(h.c.record_checkpoint(0, owner, older, 3.0), ErrorCode::StaleState);
  EXPECT_EQ(h.c.task(0).chain.size(), 1u);
}

TEST(Coordinator, HeartbeatTimeoutDisconnects) {
  Harness h("wrr");
  h.reg("a");
  h.c.tick(5.0);
  EXPECT_EQ(h.c.worker("a").status, WorkerStatus::Connected);
  h.c.handle(h.from("a", transport::HeartbeatBody{}), 5.5);
  EXPECT_DOUBLE_EQ(h.c.worker("a").last_heartbeat_s, 5.5);
  h.c.tick(11.0);
  EXPECT_EQ(h.c.worker("a").status, WorkerStatus::Connected);
  h.c.tick(11.6);
  EXPECT_EQ(h.c.worker("a").status, WorkerStatus::Disconnected);
}

TEST(Coordinator, UnregisteredSenderIsRejected) {
  Harness h("wrr");
  const auto out = h.c.handle(h.from("ghost", transport::HeartbeatBody{}), 1.0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].msg.type(), transport::MessageType::Reject);
}

TEST(Coordinator, AggregateFoldsAndCounts) {
  Harness h("wrr");
  h.reg("a");
  h.reg("b");
  h.c.submit(job(100, 4), 1.0);
  EXPECT_CROWD_ERROR(h.c.aggregate(), ErrorCode::JobNotFinished);
  std::uint64_t draws = 0;
  double now = 2.0;
  while (!h.c.finished()) {
    for (const auto& w : h.c.workers()) {
      if (!w.current_task) continue;
      const auto id = *w.current_task;
      const auto r = h.result_of(id);
      draws += bytes::decode_u64(r.substr(0, 8));
      h.c.handle(h.from(w.worker_id, transport::CommitResultBody{id, r}), now += 1.0);
      break;
    }
  }
  const auto res = h.c.aggregate();
  EXPECT_DOUBLE_EQ(res.aggregate.value, double(draws) / 100.0);
  std::uint64_t total = 0;
  for (const auto& [_, n] : res.tasks_per_worker) total += n;
  EXPECT_EQ(total, 4u);
  EXPECT_DOUBLE_EQ(res.makespan_s, now - 1.0);
}

TEST(Coordinator, MaxAttemptsFailsJob) {
  Harness h("wrr");
  h.reg("a");
  h.c.submit(job(10, 1), 1.0);
  double now = 2.0;
  for (int i = 0; i < 5; ++i) {
    h.drop("a", now += 1.0);
    h.reg("a", 8, 2.0, now += 1.0);
  }
  EXPECT_TRUE(h.c.failed());
  EXPECT_EQ(h.c.task(0).state, TaskStatus::Failed);
}
