#include <gtest/gtest.h>

#include <filesystem>

#include "crowd/tcp.hpp"
#include "support/scenarios.hpp"

using namespace crowd;
using scenarios::mc_job;
using scenarios::quiet_default6;

namespace {

std::vector<std::string> lines(const std::vector<coordinator::TraceEntry>& trace) {
  std::vector<std::string> out;
  for (const auto& e : trace) out.push_back(e.to_string());
  return out;
}

std::uint64_t total_tasks(const coordinator::JobResult& r) {
  std::uint64_t n = 0;
  for (const auto& [_, c] : r.tasks_per_worker) n += c;
  return n;
}

}  // namespace

TEST(Baseline, SingleDeviceTime) {
  workloads::MonteCarloE mc;
  const auto f = fleet::default_fleet();
  EXPECT_NEAR(sim::single_device_seconds(f[0], mc, 1'000'000), 1e6 * 3e-5 / (16.0 * 0.9), 1e-9);
  EXPECT_DOUBLE_EQ(sim::best_single_device_seconds(f, mc, 1'000'000), sim::single_device_seconds(f[0], mc, 1'000'000));
}

TEST(Simulation, SameSeedSameTrace) {
  workloads::MonteCarloE mc(1e-3);
  auto cfg = quiet_default6();
  cfg.fleet[2].churn_rate_per_min = 2.0;
  cfg.fleet[2].reconnect_min_s = 2.0;
  cfg.fleet[2].reconnect_max_s = 9.0;
  cfg.churn_schedule.reset();
  cfg.link.jitter_s = 0.02;
  auto job = mc_job(30000, 40, "mabac", 5);
  job.checkpoint = {1.0, 5, true};
  const auto a = sim::simulate(cfg, job, mc);
  const auto b = sim::simulate(cfg, job, mc);
  ASSERT_TRUE(a.completed);
  EXPECT_EQ(lines(a.trace), lines(b.trace));
  EXPECT_EQ(a.device_log, b.device_log);
  job.seed = 6;
  EXPECT_NE(lines(sim::simulate(cfg, job, mc).trace), lines(a.trace));
}

TEST(Simulation, EveryStrategyCompletesAndConserves) {
  workloads::MonteCarloE mc(1e-3);
  for (const char* name : {"fifo", "wrr", "edas", "aras", "mabac"}) {
    const auto r = sim::simulate(quiet_default6(), mc_job(12000, 37, name), mc);
    ASSERT_TRUE(r.completed) << name;
    EXPECT_EQ(total_tasks(*r.job), 37u) << name;
    for (auto c : r.accepted_commits_per_task) EXPECT_EQ(c, 1u);
    EXPECT_GT(r.job->makespan_s, 0.0);
  }
}

TEST(Simulation, AggregateIndependentOfStrategy) {
  workloads::MonteCarloE mc(1e-3);
  const auto a = sim::simulate(quiet_default6(), mc_job(5000, 10, "fifo"), mc);
  const auto b = sim::simulate(quiet_default6(), mc_job(5000, 10, "edas"), mc);
  EXPECT_EQ(a.job->aggregate.bytes, b.job->aggregate.bytes);
}

TEST(Simulation, ExactlyOnceUnderSeededChurn) {
  const auto tally = scenarios::exactly_once(12, {"fifo", "wrr", "aras"});
  EXPECT_EQ(tally.failures, 0) << tally.first_failure;
  EXPECT_GT(tally.orphans, 0);
  EXPECT_GT(tally.resumed, 0);
}

TEST(Simulation, DynamicDispatchAvoidsHeadOfLineBlocking) {
  // Two devices are nearly saturated by background load; a static queue
  // leaves their share stuck behind them.
  auto cfg = quiet_default6();
  cfg.fleet[1].background_load = 0.85;
  cfg.fleet[4].background_load = 0.85;
  workloads::MonteCarloE mc(3e-3);
  const auto fifo = sim::simulate(cfg, mc_job(60000, 120, "fifo"), mc);
  const auto wrr = sim::simulate(cfg, mc_job(60000, 120, "wrr"), mc);
  const auto edas = sim::simulate(cfg, mc_job(60000, 120, "edas"), mc);
  ASSERT_TRUE(fifo.completed && wrr.completed && edas.completed);
  EXPECT_LT(wrr.job->makespan_s, 0.7 * fifo.job->makespan_s);
  EXPECT_LT(edas.job->makespan_s, 0.7 * fifo.job->makespan_s);
}

TEST(Simulation, CheckpointingAddsBoundedOverhead) {
  workloads::MonteCarloE mc;
  auto job = mc_job(10'000'000, 6, "wrr");
  const double off = sim::simulate(quiet_default6(), job, mc).job->makespan_s;
  job.checkpoint = {5.0, 50, true};
  const double at5 = sim::simulate(quiet_default6(), job, mc).job->makespan_s;
  job.checkpoint.interval_s = 0.5;
  const double at05 = sim::simulate(quiet_default6(), job, mc).job->makespan_s;
  EXPECT_GT(at5 - off, 1.5);
  EXPECT_GT(at05, at5);
  EXPECT_LE((at05 - off) / (at5 - off), 1.5);
}

TEST(Simulation, TinyTasksLoseToOneDevice) {
  sim::SimulationConfig cfg;
  cfg.churn_schedule = std::vector<fleet::ChurnEvent>{};
  for (int i = 0; i < 5; ++i) cfg.fleet.push_back({"d" + std::to_string(i), 8, 2.0, 4.0});
  workloads::TileMap tiles(0.1);
  coordinator::JobSpec job;
  job.workload = "tilemap";
  job.total_work = 200;
  job.task_count = 200;
  const auto r = sim::simulate(cfg, job, tiles);
  ASSERT_TRUE(r.completed);
  EXPECT_GT(r.job->makespan_s, sim::best_single_device_seconds(cfg.fleet, tiles, 200));
}

TEST(Simulation, LossyLinkStillCompletes) {
  auto cfg = quiet_default6();
  cfg.link.drop_probability = 0.05;
  cfg.link.base_latency_s = 0.01;
  cfg.link.jitter_s = 0.01;
  workloads::MonteCarloE mc(1e-3);
  auto job = mc_job(20000, 24, "wrr", 4);
  job.checkpoint = {1.0, 5, true};
  const auto r = sim::simulate(cfg, job, mc);
  ASSERT_TRUE(r.completed);
  EXPECT_GT(r.messages_dropped, 0u);
  const auto clean = sim::simulate(quiet_default6(), job, mc);
  EXPECT_EQ(r.job->aggregate.bytes, clean.job->aggregate.bytes);
}

TEST(Simulation, JournalRecordsTasksAndCheckpoints) {
  const auto path = std::filesystem::temp_directory_path() / "crowd_journal_test.log";
  auto cfg = quiet_default6();
  cfg.journal_path = path.string();
  workloads::MonteCarloE mc(0.1);
  auto job = mc_job(6000, 6, "wrr");
  job.checkpoint = {1.0, 5, true};
  ASSERT_TRUE(sim::simulate(cfg, job, mc).completed);
  const auto entries = coordinator::Journal::read(path.string());
  std::size_t checkpoints = 0, completed = 0;
  for (const auto& e : entries) {
    if (e.at("kind") == "checkpoint") ++checkpoints;
    if (e.at("kind") == "task" && e.at("state") == "completed") ++completed;
  }
  EXPECT_GT(checkpoints, 0u);
  EXPECT_EQ(completed, 6u);
  std::filesystem::remove(path);
}

TEST(Tcp, LoopbackMatchesSimulationDecisions) {
  workloads::MonteCarloE mc;
  const auto job = mc_job(200000, 30, "fifo", 3);
  const auto a = sim::simulate(quiet_default6(), job, mc);
  const auto b = tcp::run_tcp(quiet_default6(), job, mc);
  ASSERT_TRUE(a.completed);
  ASSERT_TRUE(b.completed);
  EXPECT_EQ(coordinator::decisions_by_worker(a.trace), coordinator::decisions_by_worker(b.trace));
  EXPECT_EQ(a.job->aggregate.bytes, b.job->aggregate.bytes);
}

TEST(Tcp, ReconnectingWorkerDoesNotDuplicateResults) {
  workloads::MonteCarloE mc;
  auto job = mc_job(200000, 30, "wrr", 3);
  job.checkpoint = {0.01, 5, true};
  auto cfg = quiet_default6();
  cfg.churn_schedule =
      std::vector<fleet::ChurnEvent>{{"A34", fleet::ChurnKind::Disconnect, 0.02}, {"A34", fleet::ChurnKind::Reconnect, 0.3}};
  const auto r = tcp::run_tcp(cfg, job, mc);
  ASSERT_TRUE(r.completed);
  for (auto c : r.accepted_commits_per_task) EXPECT_EQ(c, 1u);
  EXPECT_EQ(r.job->aggregate.bytes, sim::simulate(quiet_default6(), job, mc).job->aggregate.bytes);
}
