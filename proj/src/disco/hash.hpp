#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <string_view>

namespace disco {

// Top 64 bits of SHA-256(name), big-endian.
struct NameHash {
  std::uint64_t value = 0;
  auto operator<=>(const NameHash&) const = default;
};

NameHash hash_name(std::string_view name);

constexpr std::uint64_t prefix_bits(NameHash h, unsigned k) { return k == 0 ? 0 : h.value >> (64 - k); }

constexpr unsigned common_prefix_length(NameHash a, NameHash b) {
  return a.value == b.value ? 64u : static_cast<unsigned>(std::countl_zero(a.value ^ b.value));
}

constexpr bool same_prefix(NameHash a, NameHash b, unsigned k) { return common_prefix_length(a, b) >= k; }

// Clockwise distance from a to b on the 2^64 ring.
constexpr std::uint64_t ring_distance_cw(NameHash a, NameHash b) { return b.value - a.value; }

constexpr std::uint64_t ring_distance(NameHash a, NameHash b) {
  const std::uint64_t cw = b.value - a.value;
  const std::uint64_t ccw = a.value - b.value;
  return cw < ccw ? cw : ccw;
}

}  // namespace disco
