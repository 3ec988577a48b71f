#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>

// Counter-based uniform generator plus Box-Muller. Every variate is a pure
// function of (seed, counter), so sampling is reproducible across platforms
// and across languages that implement the same mixing function.
//
// The word function is the SplitMix64 output sequence evaluated at an
// arbitrary offset: word(seed, c) = finalize(seed + (c + 1) * 0x9e3779b97f4a7c15).

namespace ampcrit::rng {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t finalize64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t word(std::uint64_t seed, std::uint64_t counter) {
  return finalize64(seed + (counter + 1) * kGolden);
}

// Derive an independent stream seed; stream_id tags the consumer
// (0 = field sampling, 1 = optimizer starts, 2 = Monte Carlo, ...).
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t stream_id) {
  return finalize64(seed ^ (0xd1b54a32d192ed03ULL + stream_id * 0x8cb92ba72f3d8dd7ULL));
}

// Uniform in [0, 1), 53-bit resolution.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(word(seed, counter) >> 11) * 0x1.0p-53;
}

// Standard normal pair via Box-Muller; consumes counters 2c and 2c+1.
inline std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t c) {
  const double u1 = 1.0 - uniform01(seed, 2 * c);  // (0, 1], keeps log finite
  const double u2 = uniform01(seed, 2 * c + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * M_PI * u2;
  return {r * std::cos(th), r * std::sin(th)};
}

// Circular complex Gaussian with <|z|^2> = 1.
inline std::complex<double> standard_complex(std::uint64_t seed, std::uint64_t c) {
  auto [g1, g2] = normal_pair(seed, c);
  return {g1 * M_SQRT1_2, g2 * M_SQRT1_2};
}

}  // namespace ampcrit::rng
