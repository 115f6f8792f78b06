#pragma once

// Coordinator/worker message vocabulary and its wire format.
//
// Frame layout: 4-byte big-endian payload length, then a UTF-8 JSON object.
// Every payload has "type", "sender" and "seq"; the remaining keys depend on
// the type and are fixed:
//
//   register           cores, freq_ghz, ram_gb
//   heartbeat          task_id (optional)
//   telemetry          cpu_util, free_mem_gb, battery, latency_ms, thermal, timestamp_s
//   assign_task        task_id, slice_index, begin, size, seed, start_cursor, vars
//   checkpoint_upload  task_id, cursor, vars
//   commit_result      task_id, result
//   ack                ref_seq, task_id (optional)
//   reject             ref_seq, reason, task_id (optional)
//   disconnect_notice  (none)
//
// `vars` is an object mapping variable names to hex-encoded bytes; `result`
// is hex-encoded. Unknown keys are rejected.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "crowd/bytes.hpp"
#include "crowd/checkpoint.hpp"
#include "crowd/error.hpp"
#include "crowd/random.hpp"
#include "crowd/workloads.hpp"

namespace crowd::transport {

using checkpoint::VarMap;

struct RegisterBody {
  int cores = 1;
  double freq_ghz = 1.0;
  double ram_gb = 1.0;
  bool operator==(const RegisterBody&) const = default;
};
struct HeartbeatBody {
  /// Task the worker is executing, if any.
  std::optional<std::uint64_t> task_id;
  bool operator==(const HeartbeatBody&) const = default;
};
struct TelemetryBody {
  double cpu_util = 0.0;
  double free_mem_gb = 0.0;
  double battery = 1.0;
  double latency_ms = 20.0;
  double thermal = 0.0;
  double timestamp_s = 0.0;
  bool operator==(const TelemetryBody&) const = default;
};
struct AssignTaskBody {
  std::uint64_t task_id = 0;
  workloads::SliceParams slice;
  std::uint64_t start_cursor = 0;
  /// Recovered checkpoint variables; empty for a fresh start.
  VarMap vars;
  bool operator==(const AssignTaskBody&) const = default;
};
struct CheckpointUploadBody {
  std::uint64_t task_id = 0;
  std::uint64_t cursor = 0;
  VarMap vars;
  bool operator==(const CheckpointUploadBody&) const = default;
};
struct CommitResultBody {
  std::uint64_t task_id = 0;
  std::string result;
  bool operator==(const CommitResultBody&) const = default;
};
struct AckBody {
  std::uint64_t ref_seq = 0;
  std::optional<std::uint64_t> task_id;
  bool operator==(const AckBody&) const = default;
};
struct RejectBody {
  std::uint64_t ref_seq = 0;
  std::string reason;
  std::optional<std::uint64_t> task_id;
  bool operator==(const RejectBody&) const = default;
};
struct DisconnectNoticeBody {
  bool operator==(const DisconnectNoticeBody&) const = default;
};

// Alternative order defines MessageType values.
using Body = std::variant<RegisterBody, HeartbeatBody, TelemetryBody, AssignTaskBody, CheckpointUploadBody,
                          CommitResultBody, AckBody, RejectBody, DisconnectNoticeBody>;

enum class MessageType {
  Register,
  Heartbeat,
  Telemetry,
  AssignTask,
  CheckpointUpload,
  CommitResult,
  Ack,
  Reject,
  DisconnectNotice,
};

inline constexpr std::string_view kTypeNames[] = {
    "register", "heartbeat", "telemetry", "assign_task", "checkpoint_upload",
    "commit_result", "ack", "reject", "disconnect_notice",
};

inline std::string_view to_string(MessageType t) { return kTypeNames[std::size_t(t)]; }

struct Message {
  std::string sender;
  std::uint64_t seq = 0;
  Body body;

  MessageType type() const { return MessageType(body.index()); }
  template <typename T>
  const T& as() const {
    return std::get<T>(body);
  }

  bool operator==(const Message&) const = default;
};

/// Per-sender sequence numbering.
class Outbox {
 public:
  explicit Outbox(std::string sender) : sender_(std::move(sender)) {}
  Message make(Body body) { return Message{sender_, ++seq_, std::move(body)}; }
  const std::string& sender() const noexcept { return sender_; }

 private:
  std::string sender_;
  std::uint64_t seq_ = 0;
};

// ---------------------------------------------------------------------------
// JSON payload codec

namespace detail {

using nlohmann::json;

inline json vars_to_json(const VarMap& vars) {
  json out = json::object();
  for (const auto& [name, value] : vars) out[name] = bytes::to_hex(value);
  return out;
}

inline VarMap vars_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::ProtocolError, "vars must be an object");
  VarMap vars;
  for (const auto& [name, value] : j.items()) {
    if (!value.is_string()) fail(ErrorCode::ProtocolError, "var '" + name + "' must be a hex string");
    vars.emplace(name, bytes::from_hex(value.get<std::string>()));
  }
  return vars;
}

inline void put_optional(json& j, const char* key, const std::optional<std::uint64_t>& v) {
  if (v) j[key] = *v;
}

struct BodyEncoder {
  json& j;
  void operator()(const RegisterBody& b) const {
    j["cores"] = b.cores;
    j["freq_ghz"] = b.freq_ghz;
    j["ram_gb"] = b.ram_gb;
  }
  void operator()(const HeartbeatBody& b) const { put_optional(j, "task_id", b.task_id); }
  void operator()(const TelemetryBody& b) const {
    j["cpu_util"] = b.cpu_util;
    j["free_mem_gb"] = b.free_mem_gb;
    j["battery"] = b.battery;
    j["latency_ms"] = b.latency_ms;
    j["thermal"] = b.thermal;
    j["timestamp_s"] = b.timestamp_s;
  }
  void operator()(const AssignTaskBody& b) const {
    j["task_id"] = b.task_id;
    j["slice_index"] = b.slice.index;
    j["begin"] = b.slice.begin;
    j["size"] = b.slice.size;
    j["seed"] = b.slice.seed;
    j["start_cursor"] = b.start_cursor;
    j["vars"] = vars_to_json(b.vars);
  }
  void operator()(const CheckpointUploadBody& b) const {
    j["task_id"] = b.task_id;
    j["cursor"] = b.cursor;
    j["vars"] = vars_to_json(b.vars);
  }
  void operator()(const CommitResultBody& b) const {
    j["task_id"] = b.task_id;
    j["result"] = bytes::to_hex(b.result);
  }
  void operator()(const AckBody& b) const {
    j["ref_seq"] = b.ref_seq;
    put_optional(j, "task_id", b.task_id);
  }
  void operator()(const RejectBody& b) const {
    j["ref_seq"] = b.ref_seq;
    j["reason"] = b.reason;
    put_optional(j, "task_id", b.task_id);
  }
  void operator()(const DisconnectNoticeBody&) const {}
};

/// Reads keys from a payload object and remembers which were consumed so
/// leftovers can be rejected.
class Reader {
 public:
  explicit Reader(const json& j) : j_(j) {}

  template <typename T>
  T get(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) fail(ErrorCode::ProtocolError, std::string("missing key '") + key + "'");
    used_.insert(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) throw std::invalid_argument("not a number");
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!it->is_number_unsigned()) throw std::invalid_argument("not an unsigned integer");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw std::invalid_argument("not an integer");
      }
      return it->template get<T>();
    } catch (const std::exception& e) {
      fail(ErrorCode::ProtocolError, std::string("bad value for '") + key + "': " + e.what());
    }
  }

  std::optional<std::uint64_t> optional_u64(const char* key) {
    if (!j_.contains(key)) return std::nullopt;
    return get<std::uint64_t>(key);
  }

  const json& raw(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) fail(ErrorCode::ProtocolError, std::string("missing key '") + key + "'");
    used_.insert(key);
    return *it;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!used_.count(key)) fail(ErrorCode::ProtocolError, "unexpected key '" + key + "'");
    }
  }

 private:
  const json& j_;
  std::set<std::string> used_;
};

}  // namespace detail

inline std::string encode_payload(const Message& msg) {
  nlohmann::json j = nlohmann::json::object();
  j["type"] = std::string(to_string(msg.type()));
  j["sender"] = msg.sender;
  j["seq"] = msg.seq;
  std::visit(detail::BodyEncoder{j}, msg.body);
  return j.dump();
}

inline Message decode_payload(std::string_view payload) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(payload);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ProtocolError, std::string("payload is not JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::ProtocolError, "payload must be a JSON object");

  detail::Reader r(j);
  const auto type_name = r.get<std::string>("type");
  auto it = std::find(std::begin(kTypeNames), std::end(kTypeNames), type_name);
  if (it == std::end(kTypeNames)) fail(ErrorCode::ProtocolError, "unknown message type '" + type_name + "'");
  const auto type = MessageType(it - std::begin(kTypeNames));

  Message msg;
  msg.sender = r.get<std::string>("sender");
  msg.seq = r.get<std::uint64_t>("seq");
  switch (type) {
    case MessageType::Register:
      msg.body = RegisterBody{r.get<int>("cores"), r.get<double>("freq_ghz"), r.get<double>("ram_gb")};
      break;
    case MessageType::Heartbeat: msg.body = HeartbeatBody{r.optional_u64("task_id")}; break;
    case MessageType::Telemetry: {
      TelemetryBody b;
      b.cpu_util = r.get<double>("cpu_util");
      b.free_mem_gb = r.get<double>("free_mem_gb");
      b.battery = r.get<double>("battery");
      b.latency_ms = r.get<double>("latency_ms");
      b.thermal = r.get<double>("thermal");
      b.timestamp_s = r.get<double>("timestamp_s");
      msg.body = b;
      break;
    }
    case MessageType::AssignTask: {
      AssignTaskBody b;
      b.task_id = r.get<std::uint64_t>("task_id");
      b.slice.index = r.get<std::uint64_t>("slice_index");
      b.slice.begin = r.get<std::uint64_t>("begin");
      b.slice.size = r.get<std::uint64_t>("size");
      b.slice.seed = r.get<std::uint64_t>("seed");
      b.start_cursor = r.get<std::uint64_t>("start_cursor");
      b.vars = detail::vars_from_json(r.raw("vars"));
      msg.body = std::move(b);
      break;
    }
    case MessageType::CheckpointUpload: {
      CheckpointUploadBody b;
      b.task_id = r.get<std::uint64_t>("task_id");
      b.cursor = r.get<std::uint64_t>("cursor");
      b.vars = detail::vars_from_json(r.raw("vars"));
      msg.body = std::move(b);
      break;
    }
    case MessageType::CommitResult: {
      CommitResultBody b;
      b.task_id = r.get<std::uint64_t>("task_id");
      b.result = bytes::from_hex(r.get<std::string>("result"));
      msg.body = std::move(b);
      break;
    }
    case MessageType::Ack: {
      AckBody b;
      b.ref_seq = r.get<std::uint64_t>("ref_seq");
      b.task_id = r.optional_u64("task_id");
      msg.body = b;
      break;
    }
    case MessageType::Reject: {
      RejectBody b;
      b.ref_seq = r.get<std::uint64_t>("ref_seq");
      b.reason = r.get<std::string>("reason");
      b.task_id = r.optional_u64("task_id");
      msg.body = std::move(b);
      break;
    }
    case MessageType::DisconnectNotice: msg.body = DisconnectNoticeBody{}; break;
  }
  r.finish();
  return msg;
}

// ---------------------------------------------------------------------------
// Length-prefixed framing

inline constexpr std::size_t kFrameHeaderBytes = 4;
inline constexpr std::size_t kMaxPayloadBytes = 64u << 20;

inline std::string frame_payload(std::string_view payload) {
  if (payload.empty()) fail(ErrorCode::FrameError, "empty payload");
  if (payload.size() > kMaxPayloadBytes) fail(ErrorCode::FrameError, "payload exceeds frame limit");
  std::string out;
  out.reserve(kFrameHeaderBytes + payload.size());
  bytes::put_u32_be(out, std::uint32_t(payload.size()));
  out.append(payload);
  return out;
}

inline std::string encode(const Message& msg) { return frame_payload(encode_payload(msg)); }

/// Decodes exactly one frame; trailing or missing bytes are errors.
inline Message decode(std::string_view frame) {
  if (frame.size() < kFrameHeaderBytes) fail(ErrorCode::FrameError, "truncated frame header");
  const std::uint32_t len = bytes::get_u32_be(frame);
  if (len == 0) fail(ErrorCode::FrameError, "zero-length payload");
  if (frame.size() - kFrameHeaderBytes < len) fail(ErrorCode::FrameError, "truncated frame payload");
  if (frame.size() - kFrameHeaderBytes > len) fail(ErrorCode::FrameError, "trailing bytes after frame");
  return decode_payload(frame.substr(kFrameHeaderBytes));
}

/// Incremental de-framer for stream transports.
class FrameReader {
 public:
  void feed(std::string_view data) { buffer_.append(data); }

  /// Next complete payload, if one has fully arrived.
  std::optional<std::string> next_payload() {
    if (buffer_.size() < kFrameHeaderBytes) return std::nullopt;
    const std::uint32_t len = bytes::get_u32_be(buffer_);
    if (len == 0) fail(ErrorCode::FrameError, "zero-length payload");
    if (len > kMaxPayloadBytes) fail(ErrorCode::FrameError, "payload exceeds frame limit");
    if (buffer_.size() < kFrameHeaderBytes + len) return std::nullopt;
    std::string payload = buffer_.substr(kFrameHeaderBytes, len);
    buffer_.erase(0, kFrameHeaderBytes + len);
    return payload;
  }

  std::optional<Message> next() {
    auto payload = next_payload();
    if (!payload) return std::nullopt;
    return decode_payload(*payload);
  }

  std::size_t buffered() const noexcept { return buffer_.size(); }

 private:
  std::string buffer_;
};

// ---------------------------------------------------------------------------
// Simulated link

struct LinkModel {
  double base_latency_s = 0.0;
  double jitter_s = 0.0;
  double drop_probability = 0.0;
  /// Half-open [from, to) windows during which every send is lost.
  std::vector<std::pair<double, double>> partitions;

  void validate() const {
    if (!(base_latency_s >= 0.0) || !(jitter_s >= 0.0)) fail(ErrorCode::InvalidInput, "latency must be >= 0");
    if (!(drop_probability >= 0.0 && drop_probability < 1.0)) {
      fail(ErrorCode::InvalidInput, "drop_probability must be in [0,1)");
    }
    for (std::size_t i = 0; i < partitions.size(); ++i) {
      const auto& [from, to] = partitions[i];
      if (!(from < to)) fail(ErrorCode::InvalidInput, "partition window must have from < to");
      if (i > 0 && from < partitions[i - 1].second) {
        fail(ErrorCode::InvalidInput, "partition windows must be ordered and non-overlapping");
      }
    }
  }

  bool partitioned(double t) const {
    return std::any_of(partitions.begin(), partitions.end(), [t](const auto& w) { return t >= w.first && t < w.second; });
  }

  bool operator==(const LinkModel&) const = default;
};

struct Delivery {
  bool delivered = false;
  double at_s = 0.0;
};

/// Stateless delivery decision for one send.
inline Delivery deliver(const LinkModel& link, double send_time_s, Rng& rng) {
  if (send_time_s < 0.0) fail(ErrorCode::InvalidInput, "send time must be >= 0");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double drop_roll = unit(rng);
  const double jitter_roll = unit(rng);
  if (link.partitioned(send_time_s)) return {false, 0.0};
  if (drop_roll < link.drop_probability) return {false, 0.0};
  return {true, send_time_s + link.base_latency_s + link.jitter_s * jitter_roll};
}

/// One direction of a connection. Delivered messages never overtake each other.
class SimLink {
 public:
  SimLink(LinkModel model, Rng rng) : model_(std::move(model)), rng_(std::move(rng)) { model_.validate(); }

  Delivery send(double send_time_s) {
    Delivery d = deliver(model_, send_time_s, rng_);
    if (d.delivered) {
      d.at_s = std::max(d.at_s, last_delivery_s_);
      last_delivery_s_ = d.at_s;
    }
    return d;
  }

  const LinkModel& model() const noexcept { return model_; }

 private:
  LinkModel model_;
  Rng rng_;
  double last_delivery_s_ = 0.0;
};

}  // namespace crowd::transport
