#pragma once

// Counter-based random streams. Every draw is a pure function of
// (seed, stream, index), so results never depend on thread scheduling or on
// the order in which independent consumers pull numbers.

#include <cstdint>
#include <random>

namespace spread::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a) {
  return splitmix64(splitmix64(seed) ^ (a * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL));
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return derive(derive(seed, a), b);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                               std::uint64_t c) {
  return derive(derive(seed, a, b), c);
}

/// Uniform in [0, 1) with 53 bits of resolution.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

constexpr double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return to_unit(derive(seed, stream, index));
}

/// Sequential engine for consumers that need many draws (synthetic data).
inline std::mt19937_64 engine(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(derive(seed, stream));
}

// Stream tags.
inline constexpr std::uint64_t kInitialInfection = 1;
inline constexpr std::uint64_t kContactCoin = 2;
inline constexpr std::uint64_t kRun = 3;
inline constexpr std::uint64_t kSample = 4;
inline constexpr std::uint64_t kDraw = 5;
inline constexpr std::uint64_t kSynthetic = 6;
inline constexpr std::uint64_t kScale = 7;
inline constexpr std::uint64_t kSelection = 8;

}  // namespace spread::rng
