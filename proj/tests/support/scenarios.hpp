#pragma once

// Simulation setups shared by the unit suite and the acceptance gate.

#include <random>
#include <string>
#include <vector>

#include "crowd/simulation.hpp"

namespace scenarios {

using namespace crowd;

inline sim::SimulationConfig quiet_default6() {
  sim::SimulationConfig cfg;
  cfg.fleet = fleet::default_fleet();
  cfg.churn_schedule = std::vector<fleet::ChurnEvent>{};
  return cfg;
}

inline coordinator::JobSpec mc_job(std::uint64_t trials, std::uint64_t tasks, const std::string& strategy,
                                   std::uint64_t seed = 1) {
  coordinator::JobSpec job;
  job.total_work = trials;
  job.task_count = tasks;
  job.strategy = strategy;
  job.seed = seed;
  return job;
}

/// 1 to 4 disconnects at uniform times in the first 40 s after submit, each
/// followed by a reconnect 1 to 20 s later.
inline std::vector<fleet::ChurnEvent> random_churn(std::uint64_t seed, const std::vector<fleet::DeviceProfile>& fleet) {
  Rng rng = make_rng(seed, 0);
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_int_distribution<std::size_t> who(0, fleet.size() - 1);
  std::uniform_real_distribution<double> at(0.0, 40.0), gap(1.0, 20.0);
  std::vector<fleet::ChurnEvent> ev;
  for (int k = 0, n = count(rng); k < n; ++k) {
    const auto& id = fleet[who(rng)].id;
    const double t = at(rng);
    ev.push_back({id, fleet::ChurnKind::Disconnect, t});
    ev.push_back({id, fleet::ChurnKind::Reconnect, t + gap(rng)});
  }
  return ev;
}

struct ChurnTally {
  int scenarios = 0;
  int failures = 0;
  long orphans = 0;
  long rejected = 0;
  long resumed = 0;
  std::string first_failure;
};

/// Runs the checkpointed Monte Carlo job under seeded churn and compares each
/// outcome to the fault-free aggregate.
inline ChurnTally exactly_once(int count, const std::vector<std::string>& strategies, std::uint64_t base_seed = 1000) {
  workloads::MonteCarloE workload(0.1);
  auto job = mc_job(20000, 24, "wrr", 9);
  job.checkpoint = {1.0, 5, true};
  const auto cfg = quiet_default6();
  const auto reference = sim::simulate(cfg, job, workload);

  ChurnTally tally;
  for (int s = 0; s < count; ++s) {
    auto churned = cfg;
    churned.churn_schedule = random_churn(base_seed + std::uint64_t(s), cfg.fleet);
    for (const auto& name : strategies) {
      auto j = job;
      j.strategy = name;
      const auto r = sim::simulate(churned, j, workload);
      ++tally.scenarios;
      bool ok = reference.completed && r.completed && r.job->aggregate.bytes == reference.job->aggregate.bytes;
      for (auto c : r.accepted_commits_per_task) ok = ok && c == 1;
      tally.rejected += long(r.rejected_commits);
      for (const auto& e : r.trace) {
        if (e.kind == "orphan") ++tally.orphans;
        if (e.kind == "assign" && e.detail.find("cursor=0") == std::string::npos) ++tally.resumed;
      }
      if (!ok) {
        ++tally.failures;
        if (tally.first_failure.empty()) tally.first_failure = "scenario " + std::to_string(s) + " " + name;
      }
    }
  }
  return tally;
}

}  // namespace scenarios
