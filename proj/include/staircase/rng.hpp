#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace staircase {

/// SplitMix64 finalizer; mixes a 64-bit counter into a well-distributed seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent engine for substream `stream` of `seed`. Each sampled state owns
/// its own substream, so results do not depend on evaluation order.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)));
}

/// Standard normal deviate via Box-Muller on the engine's raw 53-bit output.
/// std::normal_distribution is implementation-defined; this keeps draws
/// identical across standard libraries.
inline double standard_normal(std::mt19937_64& engine) {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  double u1 = 0.0;
  do {
    u1 = static_cast<double>(engine() >> 11) * kScale;
  } while (u1 <= 0.0);
  const double u2 = static_cast<double>(engine() >> 11) * kScale;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace staircase
