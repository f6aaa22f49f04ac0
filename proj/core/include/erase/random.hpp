#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace erase {

// Uniform double in [0, 1) from the top 53 bits of the engine output.
// Keeps sample streams identical across standard library implementations.
inline double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * canonical(rng);
}

// Box-Muller, one draw per call.
inline double gaussian(std::mt19937_64& rng) {
  double u1 = canonical(rng);
  while (u1 <= 0.0) u1 = canonical(rng);
  const double u2 = canonical(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Uniform integer in [0, n).
inline int uniform_int(std::mt19937_64& rng, int n) {
  const int k = static_cast<int>(canonical(rng) * n);
  return k < n ? k : n - 1;
}

}  // namespace erase
