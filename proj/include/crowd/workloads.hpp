#pragma once

// Resumable workloads. A task is a slice of a job; its whole state serializes
// into checkpoint variables, and every random draw is keyed by
// (slice seed, item index) so a resumed slice reproduces the exact stream no
// matter which worker picks it up.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "crowd/bytes.hpp"
#include "crowd/checkpoint.hpp"
#include "crowd/error.hpp"
#include "crowd/random.hpp"

namespace crowd::workloads {

using checkpoint::TaskState;

/// Bounds of one task's share of the job.
struct SliceParams {
  std::uint64_t index = 0;
  std::uint64_t begin = 0;
  std::uint64_t size = 0;
  std::uint64_t seed = 0;

  bool operator==(const SliceParams&) const = default;
};

inline std::uint64_t slice_seed(std::uint64_t job_seed, std::uint64_t slice_index) {
  return derive_key(job_seed, slice_index);
}

/// Folded job output. `bytes` is the canonical encoding compared across runs.
struct Aggregate {
  std::string bytes;
  double value = 0.0;
  std::string display;

  bool operator==(const Aggregate&) const = default;
};

class ResumableTask {
 public:
  virtual ~ResumableTask() = default;
  virtual std::string name() const = 0;
  /// Work units one item costs on a device delivering one unit per second.
  virtual double units_per_item() const = 0;
  virtual TaskState init(const SliceParams& params) const = 0;
  /// Runs at most `budget` items and returns how many were run.
  virtual std::uint64_t run_slice(TaskState& state, std::uint64_t budget) const = 0;
  virtual std::uint64_t remaining(const TaskState& state) const = 0;
  virtual std::string finalize(const TaskState& state) const = 0;
  virtual Aggregate fold(std::span<const std::string> results_in_slice_order) const = 0;
};

namespace detail {
inline std::uint64_t var_u64(const TaskState& s, const char* name) {
  auto it = s.vars.find(name);
  if (it == s.vars.end()) fail(ErrorCode::InvalidInput, std::string("task state lacks variable '") + name + "'");
  return bytes::decode_u64(it->second);
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Monte Carlo estimation of e: each trial counts uniform draws until their sum
// exceeds one; the expected count is exactly e.

struct MonteCarloState {
  std::uint64_t trials_target = 0;
  std::uint64_t trials_done = 0;
  std::uint64_t draw_count_sum = 0;
  std::uint64_t seed = 0;

  bool operator==(const MonteCarloState&) const = default;

  TaskState serialize() const {
    TaskState s;
    s.vars = {{"target", bytes::encode_u64(trials_target)},
              {"done", bytes::encode_u64(trials_done)},
              {"draws", bytes::encode_u64(draw_count_sum)},
              {"seed", bytes::encode_u64(seed)}};
    s.cursor = trials_done;
    return s;
  }

  static MonteCarloState deserialize(const TaskState& s) {
    MonteCarloState m;
    m.trials_target = detail::var_u64(s, "target");
    m.trials_done = detail::var_u64(s, "done");
    m.draw_count_sum = detail::var_u64(s, "draws");
    m.seed = detail::var_u64(s, "seed");
    if (m.trials_done > m.trials_target || s.cursor != m.trials_done) {
      fail(ErrorCode::InvalidInput, "inconsistent monte carlo state");
    }
    return m;
  }
};

inline std::uint64_t mc_trial_draws(std::uint64_t seed, std::uint64_t trial) {
  double sum = 0.0;
  std::uint64_t draws = 0;
  while (sum <= 1.0) {
    sum += counter_uniform(seed, trial, draws);
    ++draws;
  }
  return draws;
}

inline MonteCarloState mc_run_slice(MonteCarloState state, std::uint64_t budget_trials) {
  if (budget_trials < 1) fail(ErrorCode::InvalidInput, "trial budget must be >= 1");
  const std::uint64_t todo = std::min(budget_trials, state.trials_target - state.trials_done);
  for (std::uint64_t k = 0; k < todo; ++k) {
    state.draw_count_sum += mc_trial_draws(state.seed, state.trials_done);
    ++state.trials_done;
  }
  return state;
}

struct MonteCarloResult {
  std::uint64_t draw_count_sum = 0;
  std::uint64_t trials = 0;
};

inline double mc_fold(std::span<const MonteCarloResult> results) {
  std::uint64_t draws = 0, trials = 0;
  for (const auto& r : results) {
    draws += r.draw_count_sum;
    trials += r.trials;
  }
  if (trials == 0) fail(ErrorCode::InvalidInput, "cannot estimate e from zero trials");
  return double(draws) / double(trials);
}

class MonteCarloE final : public ResumableTask {
 public:
  explicit MonteCarloE(double units_per_trial = 3e-5) : units_per_trial_(units_per_trial) {
    if (!(units_per_trial > 0.0)) fail(ErrorCode::InvalidInput, "units per trial must be positive");
  }

  std::string name() const override { return "montecarlo"; }
  double units_per_item() const override { return units_per_trial_; }

  TaskState init(const SliceParams& params) const override {
    MonteCarloState m;
    m.trials_target = params.size;
    m.seed = params.seed;
    return m.serialize();
  }

  std::uint64_t run_slice(TaskState& state, std::uint64_t budget) const override {
    auto m = MonteCarloState::deserialize(state);
    const auto before = m.trials_done;
    m = mc_run_slice(m, budget);
    state = m.serialize();
    return m.trials_done - before;
  }

  std::uint64_t remaining(const TaskState& state) const override {
    const auto m = MonteCarloState::deserialize(state);
    return m.trials_target - m.trials_done;
  }

  std::string finalize(const TaskState& state) const override {
    const auto m = MonteCarloState::deserialize(state);
    if (m.trials_done != m.trials_target) fail(ErrorCode::InvalidInput, "monte carlo slice not finished");
    return bytes::encode_u64(m.draw_count_sum) + bytes::encode_u64(m.trials_done);
  }

  Aggregate fold(std::span<const std::string> results) const override {
    std::vector<MonteCarloResult> parsed;
    std::uint64_t draws = 0, trials = 0;
    for (const auto& r : results) {
      if (r.size() != 16) fail(ErrorCode::InvalidInput, "malformed monte carlo result");
      parsed.push_back({bytes::decode_u64(r.substr(0, 8)), bytes::decode_u64(r.substr(8, 8))});
      draws += parsed.back().draw_count_sum;
      trials += parsed.back().trials;
    }
    Aggregate a;
    a.value = mc_fold(parsed);
    a.bytes = bytes::encode_u64(draws) + bytes::encode_u64(trials);
    a.display = "e_hat=" + std::to_string(a.value) + " (" + std::to_string(trials) + " trials)";
    return a;
  }

 private:
  double units_per_trial_;
};

// ---------------------------------------------------------------------------
// Synthetic tile map: each item is a tile whose "processing" mixes a
// deterministic digest. Only its cost profile matters to scheduling.

struct TileMapState {
  std::uint64_t items_total = 0;
  std::uint64_t items_done = 0;
  std::uint64_t first_item = 0;
  std::uint64_t digest = 0;
  std::uint64_t seed = 0;

  bool operator==(const TileMapState&) const = default;

  TaskState serialize() const {
    TaskState s;
    s.vars = {{"total", bytes::encode_u64(items_total)},
              {"done", bytes::encode_u64(items_done)},
              {"first", bytes::encode_u64(first_item)},
              {"digest", bytes::encode_u64(digest)},
              {"seed", bytes::encode_u64(seed)}};
    s.cursor = items_done;
    return s;
  }

  static TileMapState deserialize(const TaskState& s) {
    TileMapState t;
    t.items_total = detail::var_u64(s, "total");
    t.items_done = detail::var_u64(s, "done");
    t.first_item = detail::var_u64(s, "first");
    t.digest = detail::var_u64(s, "digest");
    t.seed = detail::var_u64(s, "seed");
    if (t.items_done > t.items_total || s.cursor != t.items_done) {
      fail(ErrorCode::InvalidInput, "inconsistent tile map state");
    }
    return t;
  }
};

inline TileMapState tile_run_slice(TileMapState state, std::uint64_t budget_items) {
  if (budget_items < 1) fail(ErrorCode::InvalidInput, "item budget must be >= 1");
  const std::uint64_t todo = std::min(budget_items, state.items_total - state.items_done);
  for (std::uint64_t k = 0; k < todo; ++k) {
    const std::uint64_t item = state.first_item + state.items_done;
    state.digest = splitmix64(state.digest ^ derive_key(state.seed, item));
    ++state.items_done;
  }
  return state;
}

class TileMap final : public ResumableTask {
 public:
  explicit TileMap(double units_per_item = 0.01) : units_per_item_(units_per_item) {
    if (!(units_per_item > 0.0)) fail(ErrorCode::InvalidInput, "units per item must be positive");
  }

  std::string name() const override { return "tilemap"; }
  double units_per_item() const override { return units_per_item_; }

  TaskState init(const SliceParams& params) const override {
    TileMapState t;
    t.items_total = params.size;
    t.first_item = params.begin;
    t.seed = params.seed;
    return t.serialize();
  }

  std::uint64_t run_slice(TaskState& state, std::uint64_t budget) const override {
    auto t = TileMapState::deserialize(state);
    const auto before = t.items_done;
    t = tile_run_slice(t, budget);
    state = t.serialize();
    return t.items_done - before;
  }

  std::uint64_t remaining(const TaskState& state) const override {
    const auto t = TileMapState::deserialize(state);
    return t.items_total - t.items_done;
  }

  std::string finalize(const TaskState& state) const override {
    const auto t = TileMapState::deserialize(state);
    if (t.items_done != t.items_total) fail(ErrorCode::InvalidInput, "tile slice not finished");
    return bytes::encode_u64(t.digest);
  }

  Aggregate fold(std::span<const std::string> results) const override {
    Aggregate a;
    bytes::Fnv1a h;
    for (const auto& r : results) {
      a.bytes += r;
      h.update(r);
    }
    a.value = double(results.size());
    a.display = "tiles digest=" + bytes::to_hex(bytes::encode_u64(h.digest())) + " (" +
                std::to_string(results.size()) + " slices)";
    return a;
  }

 private:
  double units_per_item_;
};

inline std::unique_ptr<ResumableTask> make_workload(const std::string& name, double units_per_item) {
  if (name == "montecarlo") return std::make_unique<MonteCarloE>(units_per_item);
  if (name == "tilemap") return std::make_unique<TileMap>(units_per_item);
  fail(ErrorCode::ConfigError, "unknown workload '" + name + "'");
}

}  // namespace crowd::workloads
