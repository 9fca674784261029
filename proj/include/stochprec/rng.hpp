// SPDX-License-Identifier: Apache-2.0
//
// Deterministic RNG substreams. A substream is keyed by (seed, index) so
// parallel or out-of-order consumers always see the same draws.
#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace stochprec {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

using RngStream = std::mt19937_64;

// Substream for the given (seed, index) pair. Distinct indices yield
// statistically independent streams regardless of evaluation order.
inline RngStream substream(std::uint64_t seed, std::uint64_t index) {
  return RngStream(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x51ed2701)));
}

inline RngStream make_rng(std::uint64_t seed) { return substream(seed, 0); }

// One draw from the standard complex Gaussian CN(0, 1): real and imaginary
// parts are independent N(0, 1/2).
inline std::complex<double> complex_gaussian(RngStream& rng) {
  constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2_v<double>;
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re * inv_sqrt2, im * inv_sqrt2};
}

}  // namespace stochprec
