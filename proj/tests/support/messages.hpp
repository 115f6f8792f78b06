#pragma once

// Random well-formed protocol messages for codec fuzzing.

#include <random>
#include <string>

#include "crowd/transport.hpp"

namespace fuzz {

using namespace crowd::transport;

inline std::string random_text(std::mt19937_64& rng, std::size_t max_len) {
  // Printable ASCII plus a few multi-byte UTF-8 sequences and JSON escapes.
  static const char* const pieces[] = {"a", "Z", "0", " ", "\"", "\\", "/", "\n", "\t", "{", "}", ",", ":",
                                       "\xc3\xa9", "\xe2\x82\xac", "\xf0\x9f\x93\xb1", "+", "w"};
  std::uniform_int_distribution<std::size_t> len(0, max_len), pick(0, std::size(pieces) - 1);
  std::string s;
  for (std::size_t i = 0, n = len(rng); i < n; ++i) s += pieces[pick(rng)];
  return s;
}

inline std::string random_bytes(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> byte(0, 255);
  std::string s;
  for (std::size_t i = 0, n = len(rng); i < n; ++i) s += char(byte(rng));
  return s;
}

inline VarMap random_vars(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n(0, 4);
  VarMap v;
  for (int i = 0, k = n(rng); i < k; ++i) v[random_text(rng, 6)] = random_bytes(rng, 24);
  return v;
}

inline double random_real(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 3);
  switch (kind(rng)) {
    case 0: return 0.0;
    case 1: return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    case 2: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
    default: return std::ldexp(std::uniform_real_distribution<double>(0.5, 1.0)(rng), std::uniform_int_distribution<int>(-300, 300)(rng));
  }
}

inline std::uint64_t random_u64(std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(0, 1)(rng) ? rng() : rng() % 1000;
}

inline std::optional<std::uint64_t> maybe_u64(std::mt19937_64& rng) {
  if (std::uniform_int_distribution<int>(0, 1)(rng)) return std::nullopt;
  return random_u64(rng);
}

inline Message random_message(std::mt19937_64& rng) {
  Message m;
  m.sender = random_text(rng, 10);
  m.seq = random_u64(rng);
  switch (std::uniform_int_distribution<int>(0, 8)(rng)) {
    case 0: m.body = RegisterBody{std::uniform_int_distribution<int>(-4, 64)(rng), random_real(rng), random_real(rng)}; break;
    case 1: m.body = HeartbeatBody{maybe_u64(rng)}; break;
    case 2:
      m.body = TelemetryBody{random_real(rng), random_real(rng), random_real(rng),
                             random_real(rng), random_real(rng), random_real(rng)};
      break;
    case 3: {
      AssignTaskBody b;
      b.task_id = random_u64(rng);
      b.slice = {random_u64(rng), random_u64(rng), random_u64(rng), random_u64(rng)};
      b.start_cursor = random_u64(rng);
      b.vars = random_vars(rng);
      m.body = std::move(b);
      break;
    }
    case 4: m.body = CheckpointUploadBody{random_u64(rng), random_u64(rng), random_vars(rng)}; break;
    case 5: m.body = CommitResultBody{random_u64(rng), random_bytes(rng, 32)}; break;
    case 6: m.body = AckBody{random_u64(rng), maybe_u64(rng)}; break;
    case 7: m.body = RejectBody{random_u64(rng), random_text(rng, 20), maybe_u64(rng)}; break;
    default: m.body = DisconnectNoticeBody{}; break;
  }
  return m;
}

/// Encodes and decodes `count` random messages; returns the first failing
/// index or -1.
inline long round_trip(std::uint64_t seed, long count) {
  std::mt19937_64 rng(seed);
  for (long i = 0; i < count; ++i) {
    const auto m = random_message(rng);
    const auto frame = encode(m);
    if (decode(frame) != m || encode(decode(frame)) != frame) return i;
  }
  return -1;
}

}  // namespace fuzz
