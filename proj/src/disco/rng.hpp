#pragma once

#include <cstdint>
#include <random>

namespace disco {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double to_unit_interval(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

// Independent sub-seed for a named consumer of a run seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

namespace streams {
inline constexpr std::uint64_t topology = 1;
inline constexpr std::uint64_t landmarks = 2;
inline constexpr std::uint64_t estimates = 3;
inline constexpr std::uint64_t overlay = 4;
inline constexpr std::uint64_t vrr = 5;
inline constexpr std::uint64_t pairs = 6;
inline constexpr std::uint64_t congestion = 7;
}  // namespace streams

// mt19937_64 with explicit mappings; std distributions are not portable across libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01() { return to_unit_interval(engine_()); }

  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace disco
