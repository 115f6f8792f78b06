#pragma once

#include <cstdint>
#include <random>

namespace crowd {

/// Sequential stream used for telemetry, churn, link jitter and tie-free
/// simulation noise. One stream per owner keeps runs reproducible.
using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent 64-bit key from a parent key and a label.
inline constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t label) noexcept {
  return splitmix64(parent ^ splitmix64(label + 0x632be59bd9b4e019ULL));
}

/// Stateless generator: the value depends only on (key, counter, lane), so
/// any position of a stream can be regenerated without replaying it.
inline constexpr double counter_uniform(std::uint64_t key, std::uint64_t counter, std::uint64_t lane) noexcept {
  const std::uint64_t bits = splitmix64(splitmix64(key + counter * 0xd1342543de82ef95ULL) ^ lane);
  return double(bits >> 11) * 0x1.0p-53;
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream), std::uint32_t(stream >> 32)};
  return Rng(seq);
}

}  // namespace crowd
