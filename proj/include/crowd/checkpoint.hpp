#pragma once

// Tiered checkpoint chains. A chain starts with a Base snapshot, grows by
// Delta records holding only changed variables, and is folded into a single
// Compacted record once k deltas have accumulated, so recovery never replays
// more than k+1 records.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "crowd/bytes.hpp"
#include "crowd/error.hpp"

namespace crowd::checkpoint {

enum class CheckpointTier { Base, Delta, Compacted };

inline std::string_view to_string(CheckpointTier tier) {
  switch (tier) {
    case CheckpointTier::Base: return "base";
    case CheckpointTier::Delta: return "delta";
    case CheckpointTier::Compacted: return "compacted";
  }
  return "?";
}

inline CheckpointTier tier_from_string(std::string_view s) {
  if (s == "base") return CheckpointTier::Base;
  if (s == "delta") return CheckpointTier::Delta;
  if (s == "compacted") return CheckpointTier::Compacted;
  fail(ErrorCode::CorruptChain, "unknown checkpoint tier '" + std::string(s) + "'");
}

/// Serialized task variables. Values are opaque bytes.
using VarMap = std::map<std::string, std::string>;

struct TaskState {
  VarMap vars;
  std::uint64_t cursor = 0;

  bool operator==(const TaskState&) const = default;
};

struct CheckpointPolicy {
  double interval_s = 5.0;
  std::size_t compaction_threshold = 50;
  bool enabled = true;

  void validate() const {
    if (!(interval_s > 0.0) || !std::isfinite(interval_s)) {
      fail(ErrorCode::InvalidInput, "checkpoint interval must be positive");
    }
    if (compaction_threshold < 1) fail(ErrorCode::InvalidInput, "compaction threshold must be >= 1");
  }

  bool operator==(const CheckpointPolicy&) const = default;
};

inline bool should_checkpoint(const CheckpointPolicy& policy, double elapsed_since_last_s) {
  return policy.enabled && elapsed_since_last_s >= policy.interval_s;
}

struct CheckpointRecord {
  std::uint64_t task_id = 0;
  std::uint64_t seq = 0;
  CheckpointTier tier = CheckpointTier::Base;
  VarMap vars;
  std::uint64_t cursor = 0;
  double created_at_s = 0.0;
  std::uint64_t checksum = 0;

  std::uint64_t compute_checksum() const {
    bytes::Fnv1a h;
    h.update_u64(task_id);
    h.update_u64(seq);
    h.update_u64(vars.size());
    for (const auto& [name, value] : vars) {
      h.update_field(name);
      h.update_field(value);
    }
    h.update_u64(cursor);
    return h.digest();
  }

  void seal() { checksum = compute_checksum(); }
  bool verify() const { return checksum == compute_checksum(); }
  bool is_full() const { return tier != CheckpointTier::Delta; }

  bool operator==(const CheckpointRecord&) const = default;
};

inline nlohmann::json to_json(const CheckpointRecord& r) {
  nlohmann::json vars = nlohmann::json::object();
  for (const auto& [name, value] : r.vars) vars[name] = bytes::to_hex(value);
  return {{"task_id", r.task_id}, {"seq", r.seq},       {"tier", std::string(to_string(r.tier))},
          {"vars", vars},         {"cursor", r.cursor}, {"created_at_s", r.created_at_s},
          {"checksum", r.checksum}};
}

inline CheckpointRecord record_from_json(const nlohmann::json& j) {
  try {
    CheckpointRecord r;
    r.task_id = j.at("task_id").get<std::uint64_t>();
    r.seq = j.at("seq").get<std::uint64_t>();
    r.tier = tier_from_string(j.at("tier").get<std::string>());
    for (const auto& [name, value] : j.at("vars").items()) r.vars[name] = bytes::from_hex(value.get<std::string>());
    r.cursor = j.at("cursor").get<std::uint64_t>();
    r.created_at_s = j.at("created_at_s").get<double>();
    r.checksum = j.at("checksum").get<std::uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::CorruptChain, std::string("malformed checkpoint record: ") + e.what());
  }
}

struct RecoverStats {
  std::size_t records_read = 0;
};

class CheckpointChain {
 public:
  CheckpointChain() = default;
  CheckpointChain(std::uint64_t task_id, CheckpointPolicy policy) : task_id_(task_id), policy_(policy) {
    policy_.validate();
  }

  /// Adopts records read back from storage. Structure is checked lazily by recover().
  static CheckpointChain from_records(std::uint64_t task_id, CheckpointPolicy policy,
                                      std::vector<CheckpointRecord> records) {
    CheckpointChain chain(task_id, policy);
    chain.records_ = std::move(records);
    return chain;
  }

  std::uint64_t task_id() const noexcept { return task_id_; }
  const CheckpointPolicy& policy() const noexcept { return policy_; }
  const std::vector<CheckpointRecord>& records() const noexcept { return records_; }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t size() const noexcept { return records_.size(); }

  std::size_t deltas_since_full() const {
    std::size_t n = 0;
    for (auto it = records_.rbegin(); it != records_.rend() && !it->is_full(); ++it) ++n;
    return n;
  }

  /// Records `state` and returns the appended record, or nullptr when nothing
  /// changed since the previous record. May compact the chain afterwards.
  const CheckpointRecord* append(const TaskState& state, double now_s = 0.0) {
    if (records_.empty()) {
      push(CheckpointTier::Base, state.vars, state.cursor, now_s, 0);
      return &records_.back();
    }
    const TaskState current = recover();
    if (state.cursor < current.cursor) {
      fail(ErrorCode::StaleState, "cursor " + std::to_string(state.cursor) + " regresses below " +
                                      std::to_string(current.cursor) + " for task " + std::to_string(task_id_));
    }
    const std::uint64_t seq = records_.back().seq + 1;

    bool removed = false;
    for (const auto& [name, _] : current.vars) {
      if (!state.vars.count(name)) {
        removed = true;
        break;
      }
    }
    // Deltas cannot express removals; a fresh snapshot restarts the chain tail.
    if (removed) {
      push(CheckpointTier::Base, state.vars, state.cursor, now_s, seq);
      return &records_.back();
    }

    VarMap changed;
    for (const auto& [name, value] : state.vars) {
      auto it = current.vars.find(name);
      if (it == current.vars.end() || it->second != value) changed.emplace(name, value);
    }
    if (changed.empty() && state.cursor == current.cursor) return nullptr;

    push(CheckpointTier::Delta, std::move(changed), state.cursor, now_s, seq);
    if (deltas_since_full() >= policy_.compaction_threshold) {
      compact();
    }
    return &records_.back();
  }

  /// Folds the whole chain into one Compacted record carrying the recovered state.
  void compact() {
    if (records_.empty()) fail(ErrorCode::EmptyChain, "cannot compact an empty chain");
    const TaskState state = recover();
    const auto& newest = records_.back();
    CheckpointRecord folded;
    folded.task_id = task_id_;
    folded.seq = newest.seq;
    folded.tier = CheckpointTier::Compacted;
    folded.vars = state.vars;
    folded.cursor = state.cursor;
    folded.created_at_s = newest.created_at_s;
    folded.seal();
    records_.clear();
    records_.push_back(std::move(folded));
  }

  TaskState recover(RecoverStats* stats = nullptr) const {
    if (records_.empty()) fail(ErrorCode::EmptyChain, "cannot recover from an empty chain");
    if (!records_.front().is_full()) fail(ErrorCode::CorruptChain, "chain does not start with a full snapshot");

    std::size_t start = records_.size() - 1;
    while (!records_[start].is_full()) --start;

    TaskState state;
    std::size_t read = 0;
    for (std::size_t i = start; i < records_.size(); ++i) {
      const auto& r = records_[i];
      ++read;
      if (!r.verify()) fail(ErrorCode::CorruptChain, "checksum mismatch at seq " + std::to_string(r.seq));
      if (r.task_id != task_id_) fail(ErrorCode::CorruptChain, "record belongs to another task");
      if (i > start && (r.seq != records_[i - 1].seq + 1 || r.cursor < state.cursor)) {
        fail(ErrorCode::CorruptChain, "non-contiguous chain at seq " + std::to_string(r.seq));
      }
      if (r.is_full()) {
        state.vars = r.vars;
      } else {
        for (const auto& [name, value] : r.vars) state.vars[name] = value;
      }
      state.cursor = r.cursor;
    }
    if (stats) stats->records_read = read;
    return state;
  }

 private:
  void push(CheckpointTier tier, VarMap vars, std::uint64_t cursor, double now_s, std::uint64_t seq) {
    CheckpointRecord r;
    r.task_id = task_id_;
    r.seq = seq;
    r.tier = tier;
    r.vars = std::move(vars);
    r.cursor = cursor;
    r.created_at_s = now_s;
    r.seal();
    records_.push_back(std::move(r));
  }

  std::uint64_t task_id_ = 0;
  CheckpointPolicy policy_;
  std::vector<CheckpointRecord> records_;
};

}  // namespace crowd::checkpoint
