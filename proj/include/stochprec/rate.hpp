// SPDX-License-Identifier: Apache-2.0
//
// Instantaneous user rates and the Monte-Carlo estimator of the long-term
// average weighted sum rate. All rates are in nats.
#pragma once

#include <cstdint>

#include "stochprec/fading.hpp"
#include "stochprec/network.hpp"

namespace stochprec {

// log det(I + H V V^H H^H F^{-1}) for user u, with F the interference-plus-
// noise covariance over all other users' precoders. F is solved through a
// Cholesky factorization, never inverted explicitly.
double instantaneous_rate(const NetworkConfig& cfg, const ChannelRealization& h, int user_idx,
                          const PrecoderSet& v);

// Sum over users of weight * instantaneous_rate on one realization.
double weighted_sum_rate(const NetworkConfig& cfg, const ChannelRealization& h, const PrecoderSet& v);

struct McRateEstimate {
  double mean = 0.0;
  double half_width_99 = 0.0;     // normal-approximation 99% CI half-width
  std::uint64_t block_digest = 0; // digest of all sampled blocks, in block order
  int n_blocks = 0;
};

// Averages the weighted sum rate over n_blocks i.i.d. fading blocks. Block
// b is drawn from substream(seed, b), so the estimate is a pure function of
// (model, v, n_blocks, seed) regardless of evaluation order.
McRateEstimate monte_carlo_weighted_sum_rate(const FadingModel& model, const NetworkConfig& cfg,
                                             const PrecoderSet& v, int n_blocks, std::uint64_t seed);

// Same blocks, several precoder sets at once (common random numbers).
std::vector<McRateEstimate> monte_carlo_weighted_sum_rate_multi(
    const FadingModel& model, const NetworkConfig& cfg, const std::vector<const PrecoderSet*>& vs,
    int n_blocks, std::uint64_t seed);

}  // namespace stochprec
