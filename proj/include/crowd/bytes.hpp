#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "crowd/error.hpp"

namespace crowd::bytes {

inline std::string encode_u64(std::uint64_t v) {
  std::string out(8, '\0');
  for (int i = 7; i >= 0; --i) {
    out[std::size_t(i)] = char(v & 0xffU);
    v >>= 8;
  }
  return out;
}

inline std::uint64_t decode_u64(std::string_view s) {
  if (s.size() != 8) fail(ErrorCode::InvalidInput, "expected 8 bytes, got " + std::to_string(s.size()));
  std::uint64_t v = 0;
  for (unsigned char c : s) v = (v << 8) | c;
  return v;
}

inline void put_u32_be(std::string& out, std::uint32_t v) {
  out.push_back(char((v >> 24) & 0xffU));
  out.push_back(char((v >> 16) & 0xffU));
  out.push_back(char((v >> 8) & 0xffU));
  out.push_back(char(v & 0xffU));
}

inline std::uint32_t get_u32_be(std::string_view s) {
  return (std::uint32_t(std::uint8_t(s[0])) << 24) | (std::uint32_t(std::uint8_t(s[1])) << 16) |
         (std::uint32_t(std::uint8_t(s[2])) << 8) | std::uint32_t(std::uint8_t(s[3]));
}

inline std::string to_hex(std::string_view raw) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(raw.size() * 2);
  for (unsigned char c : raw) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0x0f]);
  }
  return out;
}

inline std::string from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) fail(ErrorCode::ProtocolError, "odd-length hex string");
  std::string out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) fail(ErrorCode::ProtocolError, "invalid hex digit");
    out.push_back(char((hi << 4) | lo));
  }
  return out;
}

/// 64-bit FNV-1a, fed incrementally.
class Fnv1a {
 public:
  void update(std::string_view data) {
    for (unsigned char c : data) {
      hash_ ^= c;
      hash_ *= 0x100000001b3ULL;
    }
  }
  void update_u64(std::uint64_t v) { update(encode_u64(v)); }
  /// Length-prefixed so ("ab","c") and ("a","bc") hash differently.
  void update_field(std::string_view data) {
    update_u64(data.size());
    update(data);
  }
  std::uint64_t digest() const noexcept { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace crowd::bytes
