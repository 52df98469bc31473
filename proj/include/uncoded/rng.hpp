#pragma once

// Counter-based random words: SplitMix64 evaluated at an explicit counter,
//   word(seed, ctr) = mix(seed + (ctr + 1) * 0x9e3779b97f4a7c15)
// with the standard SplitMix64 finalizer constants. Any word is a pure
// function of (seed, ctr), so sample streams can be generated in any order
// and in parallel with identical results.

#include <cstdint>

namespace uncoded {

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t rng_word(std::uint64_t seed, std::uint64_t ctr) {
  return mix64(seed + (ctr + 1) * 0x9e3779b97f4a7c15ULL);
}

// Uniform in (0, 1): 53 mantissa bits, offset by half an ulp to avoid 0.
inline double rng_unit(std::uint64_t seed, std::uint64_t ctr) {
  return (static_cast<double>(rng_word(seed, ctr) >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two counter words.
double rng_normal(std::uint64_t seed, std::uint64_t ctr_pair);

// Inverse standard normal CDF (Acklam's rational approximation, refined by
// one Halley step; |error| < 1e-15 over (0,1)).
double inv_normal_cdf(double p);

}  // namespace uncoded
