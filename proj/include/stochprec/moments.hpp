// SPDX-License-Identifier: Apache-2.0
//
// First/second channel moments: the only channel knowledge the solvers use.
// Second moments are indexed by column-major vectorization: entry
// ((m'-1)*M_r + m, (n'-1)*M_r + n) of D is E[H(m,m') * conj(H(n,n'))].
#pragma once

#include <cstdint>
#include <vector>

#include "stochprec/fading.hpp"
#include "stochprec/network.hpp"

namespace stochprec {

struct ChannelMoments {
  int cells = 1;
  int rx_antennas = 1;
  int tx_antennas = 1;
  std::vector<MatrixXcd> mean;    // C per user: first moment of the direct link
  std::vector<MatrixXcd> second;  // D per (user, bs) link, user-major, Hermitian PSD

  int n_users() const { return static_cast<int>(mean.size()); }
  const MatrixXcd& C(int user_idx) const { return mean[user_idx]; }
  const MatrixXcd& D(int user_idx, int bs) const {
    return second[static_cast<std::size_t>(user_idx) * cells + bs];
  }

  // Checks dimensions, Hermitian PSD second moments, and that the direct
  // link's covariance D - vec(C) vec(C)^H is PSD (all to 1e-9 relative).
  void validate() const;
};

// Closed-form moments of a fading model:
//   C = rho * Hbar (direct link),
//   D = vec(rho Hbar) vec(rho Hbar)^H + (1 - rho^2) diag(vec(S)),
// with S the entrywise variance of the random part (W.^2 or Omega).
ChannelMoments analytic_moments(const FadingModel& model);

// Sample-average moments over n_samples independent draws. Warns to stderr
// when n_samples < rx*tx (rank-deficient D), but still returns the averages.
ChannelMoments empirical_moments(const FadingModel& model, int n_samples, std::uint64_t seed);

// Rank-1 moments of a deterministic channel set (one matrix per link):
// C is the direct link, D = vec(H) vec(H)^H. Zero-variance special case.
ChannelMoments deterministic_moments(const std::vector<MatrixXcd>& channels, int cells);

}  // namespace stochprec
