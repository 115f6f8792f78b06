// Drives a simulated job through the library API without the harness:
// build a fleet, pick a strategy, run, and look at who did what.

#include <cstdio>

#include "crowd/crowd.hpp"

int main() {
  using namespace crowd;

  sim::SimulationConfig config;
  config.fleet = fleet::default_fleet();
  config.fleet[3].background_load = 0.6;  // one handset is busy with something else
  config.churn_schedule = std::vector<fleet::ChurnEvent>{};

  coordinator::JobSpec job;
  job.total_work = 2'000'000;
  job.task_count = 120;
  job.seed = 42;

  workloads::MonteCarloE estimator(3e-4);
  for (const char* strategy : {"fifo", "wrr", "edas"}) {
    job.strategy = strategy;
    const auto r = sim::simulate(config, job, estimator);
    if (!r.completed) {
      std::printf("%s: job failed\n", strategy);
      return 1;
    }
    std::printf("%-5s makespan %7.2f s  %s\n", strategy, r.job->makespan_s, r.job->aggregate.display.c_str());
    for (const auto& [worker, n] : r.job->tasks_per_worker) std::printf("      %-8s %3llu tasks\n", worker.c_str(),
                                                                        static_cast<unsigned long long>(n));
  }
  return 0;
}
