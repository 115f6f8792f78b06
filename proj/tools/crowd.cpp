// Command-line front end for the experiment harness.
//
//   crowd run              --config scenario.json [--out-dir out] [--seed N] [--mode sim|tcp] [--port P]
//   crowd compare          --config scenario.json [--strategies fifo,wrr,...]
//   crowd sweep-checkpoint --config scenario.json [--intervals 5,2,0.5]
//   crowd fault-demo       --config scenario.json
//
// Exit status: 0 success, 1 a job failed, 2 invalid configuration or usage.
// CROWD_LOG selects the log level (trace, debug, info, warn, error, off).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "crowd/harness.hpp"

namespace {

struct Common {
  std::string config;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::uint16_t> port;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "scenario JSON file")->required();
  cmd->add_option("--out-dir", c.out_dir, "directory for CSV and markdown artifacts");
  cmd->add_option("--seed", c.seed, "base seed (repetition r uses seed + r)");
  cmd->add_option("--mode", c.mode, "sim or tcp")->check(CLI::IsMember({"sim", "tcp"}));
  cmd->add_option("--port", c.port, "loopback port for tcp mode (0 picks one)");
}

crowd::harness::Scenario load(const Common& c) {
  auto s = crowd::harness::load_scenario(c.config);
  if (c.seed) s.seed = *c.seed;
  if (c.mode) s.mode = crowd::harness::mode_from_string(*c.mode);
  if (c.port) s.port = *c.port;
  spdlog::info("loaded scenario '{}' ({} workers, {} tasks, strategy {})", s.name, s.sim.fleet.size(),
               s.job.task_count, s.job.strategy);
  return s;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("crowd");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("CROWD_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

int finish(const crowd::harness::Report& rep, const Common& c, const std::string& table, bool summary) {
  if (rep.failed) {
    spdlog::error("a job failed before completing all tasks");
    return 1;
  }
  crowd::harness::write_report(c.out_dir, rep, table, summary);
  std::cout << rep.table;
  spdlog::info("wrote {} runs to {}", rep.runs.size(), c.out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Crowd computing coordinator experiments"};
  app.require_subcommand(1);

  Common run_opts, cmp_opts, sweep_opts, demo_opts;
  std::vector<std::string> strategies;
  std::vector<double> intervals;

  auto* run_cmd = app.add_subcommand("run", "run repetitions of one scenario");
  add_common(run_cmd, run_opts);
  auto* cmp_cmd = app.add_subcommand("compare", "compare strategies on identical seeds");
  add_common(cmp_cmd, cmp_opts);
  cmp_cmd->add_option("--strategies", strategies, "strategies, first is the baseline")->delimiter(',');
  auto* sweep_cmd = app.add_subcommand("sweep-checkpoint", "checkpoint interval sweep");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--intervals", intervals, "checkpoint intervals in seconds")->delimiter(',');
  auto* demo_cmd = app.add_subcommand("fault-demo", "scripted churn run printing the event trace");
  add_common(demo_cmd, demo_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    using namespace crowd::harness;
    if (run_cmd->parsed()) {
      return finish(run(load(run_opts)), run_opts, "summary.md", true);
    }
    if (cmp_cmd->parsed()) {
      auto s = load(cmp_opts);
      if (strategies.empty()) strategies = s.compare.empty() ? std::vector<std::string>{"fifo", "wrr"} : s.compare;
      return finish(compare(s, strategies), cmp_opts, "comparison.md", false);
    }
    if (sweep_cmd->parsed()) {
      auto s = load(sweep_opts);
      if (intervals.empty()) intervals = s.intervals.empty() ? std::vector<double>{5.0, 2.0, 0.5} : s.intervals;
      return finish(sweep_checkpoint(s, intervals), sweep_opts, "sweep.md", false);
    }
    bool failed = false;
    const auto lines = fault_demo(load(demo_opts), failed);
    std::string text;
    for (const auto& l : lines) text += l + "\n";
    std::filesystem::create_directories(demo_opts.out_dir);
    write_file(std::filesystem::path(demo_opts.out_dir) / "trace.txt", text);
    std::cout << text;
    return failed ? 1 : 0;
  } catch (const crowd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case crowd::ErrorCode::ConfigError:
      case crowd::ErrorCode::InvalidJob:
      case crowd::ErrorCode::InvalidInput: return 2;
      default: return 1;
    }
  }
}
