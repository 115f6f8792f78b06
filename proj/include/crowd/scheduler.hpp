#pragma once

// Pluggable worker-selection strategies. The coordinator's dispatch loop only
// talks to the Strategy interface; new strategies are added to a registry.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crowd/decision.hpp"
#include "crowd/error.hpp"
#include "crowd/fleet.hpp"
#include "crowd/random.hpp"

namespace crowd::scheduler {

enum class StrategyKind { Fifo, Wrr, Edas, Aras, Mabac };

/// Static: tasks are pre-partitioned into per-worker queues at submission.
/// Dynamic: each task is matched to a worker when a dispatch decision fires.
enum class DispatchMode { Static, Dynamic };

inline DispatchMode dispatch_mode(StrategyKind kind) {
  return kind == StrategyKind::Fifo ? DispatchMode::Static : DispatchMode::Dynamic;
}

inline std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Fifo: return "fifo";
    case StrategyKind::Wrr: return "wrr";
    case StrategyKind::Edas: return "edas";
    case StrategyKind::Aras: return "aras";
    case StrategyKind::Mabac: return "mabac";
  }
  return "?";
}

struct Candidate {
  fleet::DeviceProfile profile;
  fleet::TelemetrySnapshot telemetry;
};

/// Static capability used as the WRR weight and as an MCDM criterion.
inline double capability_weight(const fleet::DeviceProfile& profile) {
  return double(profile.cores) * profile.freq_ghz;
}

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  virtual DispatchMode mode() const = 0;
  /// Picks one of `candidates`; never called with an empty list.
  virtual std::string pick(std::span<const Candidate> candidates, Rng& rng) = 0;
};

inline std::string select_worker(Strategy& strategy, std::span<const Candidate> candidates, Rng& rng) {
  if (candidates.empty()) fail(ErrorCode::NoWorkers, "no candidate workers for " + strategy.name());
  if (candidates.size() == 1) {
    // Keep rotation/credit state in step even when the choice is forced.
    strategy.pick(candidates, rng);
    return candidates.front().profile.id;
  }
  return strategy.pick(candidates, rng);
}

/// Registration-order rotation; telemetry is never consulted.
class FifoStrategy final : public Strategy {
 public:
  std::string name() const override { return "fifo"; }
  DispatchMode mode() const override { return DispatchMode::Static; }

  std::string pick(std::span<const Candidate> candidates, Rng&) override {
    for (const auto& c : candidates) {
      if (std::find(order_.begin(), order_.end(), c.profile.id) == order_.end()) order_.push_back(c.profile.id);
    }
    for (std::size_t step = 0; step < order_.size(); ++step) {
      const std::size_t idx = (next_ + step) % order_.size();
      const auto& id = order_[idx];
      const bool available = std::any_of(candidates.begin(), candidates.end(),
                                         [&](const Candidate& c) { return c.profile.id == id; });
      if (available) {
        next_ = idx + 1;
        return id;
      }
    }
    fail(ErrorCode::NoWorkers, "fifo rotation found no candidate");
  }

 private:
  std::vector<std::string> order_;
  std::size_t next_ = 0;
};

/// Smooth (credit-based) weighted round-robin over the offered candidates.
class WrrStrategy final : public Strategy {
 public:
  std::string name() const override { return "wrr"; }
  DispatchMode mode() const override { return DispatchMode::Dynamic; }

  void set_weight(const std::string& id, double weight) {
    if (!(weight > 0.0)) fail(ErrorCode::InvalidInput, "wrr weight must be positive");
    entries_[id].weight = weight;
  }
  double credit(const std::string& id) const { return entries_.at(id).credit; }

  std::string pick(std::span<const Candidate> candidates, Rng&) override {
    double total = 0.0;
    Entry* best = nullptr;
    const std::string* best_id = nullptr;
    for (const auto& c : candidates) {
      auto [it, inserted] = entries_.try_emplace(c.profile.id);
      if (inserted || it->second.weight <= 0.0) it->second.weight = capability_weight(c.profile);
      it->second.credit += it->second.weight;
      total += it->second.weight;
      if (best == nullptr || it->second.credit > best->credit ||
          (it->second.credit == best->credit && it->first < *best_id)) {
        best = &it->second;
        best_id = &it->first;
      }
    }
    best->credit -= total;
    return *best_id;
  }

 private:
  struct Entry {
    double weight = 0.0;
    double credit = 0.0;
  };
  std::map<std::string, Entry> entries_;
};

/// Criteria fed to the MCDM methods, in matrix column order.
inline std::vector<decision::Criterion> scheduling_criteria() {
  using decision::CriterionDirection;
  return {{"capability", CriterionDirection::Benefit}, {"free_mem_gb", CriterionDirection::Benefit},
          {"battery", CriterionDirection::Benefit},    {"cpu_util", CriterionDirection::Cost},
          {"latency_ms", CriterionDirection::Cost},    {"thermal", CriterionDirection::Cost}};
}

inline constexpr double kMatrixFloor = 1e-6;

inline decision::DecisionMatrix build_decision_matrix(std::span<const Candidate> candidates) {
  std::vector<std::string> ids;
  std::vector<double> values;
  ids.reserve(candidates.size());
  values.reserve(candidates.size() * 6);
  for (const auto& c : candidates) {
    ids.push_back(c.profile.id);
    const auto& t = c.telemetry;
    for (double v : {capability_weight(c.profile), t.free_mem_gb, t.battery, t.cpu_util, t.latency_ms, t.thermal}) {
      values.push_back(std::max(v, kMatrixFloor));
    }
  }
  return decision::DecisionMatrix(std::move(ids), scheduling_criteria(), std::move(values));
}

/// Entropy-weighted MCDM ranking over the idle candidates; the top one wins.
class McdmStrategy final : public Strategy {
 public:
  explicit McdmStrategy(decision::Method method) : method_(method) {}

  std::string name() const override {
    switch (method_) {
      case decision::Method::Edas: return "edas";
      case decision::Method::Aras: return "aras";
      case decision::Method::Mabac: return "mabac";
    }
    return "mcdm";
  }
  DispatchMode mode() const override { return DispatchMode::Dynamic; }

  std::string pick(std::span<const Candidate> candidates, Rng&) override {
    if (candidates.size() == 1) return candidates.front().profile.id;
    const auto matrix = build_decision_matrix(candidates);
    const auto weights = decision::entropy_weights(matrix);
    return decision::score(method_, matrix, weights).best();
  }

 private:
  decision::Method method_;
};

inline std::unique_ptr<Strategy> make_strategy(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Fifo: return std::make_unique<FifoStrategy>();
    case StrategyKind::Wrr: return std::make_unique<WrrStrategy>();
    case StrategyKind::Edas: return std::make_unique<McdmStrategy>(decision::Method::Edas);
    case StrategyKind::Aras: return std::make_unique<McdmStrategy>(decision::Method::Aras);
    case StrategyKind::Mabac: return std::make_unique<McdmStrategy>(decision::Method::Mabac);
  }
  fail(ErrorCode::InvalidInput, "unknown strategy kind");
}

class StrategyRegistry {
 public:
  using Factory = std::function<std::unique_ptr<Strategy>()>;

  StrategyRegistry() {
    for (auto kind : {StrategyKind::Fifo, StrategyKind::Wrr, StrategyKind::Edas, StrategyKind::Aras,
                      StrategyKind::Mabac}) {
      factories_.emplace(std::string(to_string(kind)), [kind] { return make_strategy(kind); });
    }
  }

  void add(const std::string& name, Factory factory) {
    if (name.empty() || !factory) fail(ErrorCode::InvalidInput, "strategy registration needs a name and factory");
    if (!factories_.emplace(name, std::move(factory)).second) {
      fail(ErrorCode::InvalidInput, "strategy '" + name + "' is already registered");
    }
  }

  bool contains(const std::string& name) const { return factories_.count(name) != 0; }

  std::unique_ptr<Strategy> create(const std::string& name) const {
    auto it = factories_.find(name);
    if (it == factories_.end()) fail(ErrorCode::ConfigError, "unknown strategy '" + name + "'");
    return it->second();
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : factories_) out.push_back(name);
    return out;
  }

 private:
  std::map<std::string, Factory> factories_;
};

}  // namespace crowd::scheduler
