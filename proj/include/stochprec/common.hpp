// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stochprec {

inline constexpr const char* kVersion = "0.1.0";

// Invalid dimensions, inconsistent configuration, malformed config files.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite or otherwise unusable numeric input.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numeric routine failed beyond its built-in safeguards.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 30.0 + 10.0 * std::log10(watts); }

inline double nats_to_bits(double nats) { return nats / std::numbers::ln2_v<double>; }

// FNV-1a, used for config digests and Monte-Carlo block digests.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

}  // namespace stochprec
