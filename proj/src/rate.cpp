// SPDX-License-Identifier: Apache-2.0
#include "stochprec/rate.hpp"

#include <cmath>

#include "stochprec/common.hpp"

namespace stochprec {

double instantaneous_rate(const NetworkConfig& cfg, const ChannelRealization& h, int user_idx,
                          const PrecoderSet& v) {
  const int mr = cfg.rx_antennas;
  if (!(cfg.noise > 0.0)) throw ConfigError("noise power must be positive");
  const int serving = user_idx / cfg.users_per_cell;
  const double jitter = 1e-12 * cfg.noise;

  // F = sum over interfering (l, s) of (H V)(H V)^H + sigma^2 I. F >= sigma^2 I.
  MatrixXcd f = cfg.noise * MatrixXcd::Identity(mr, mr);
  MatrixXcd signal;
  for (int l = 0; l < cfg.cells; ++l) {
    const MatrixXcd& hl = h.H(user_idx, l);
    if (hl.rows() != mr || hl.cols() != cfg.tx_antennas)
      throw ConfigError("channel dimensions do not match the configuration");
    if (!hl.allFinite()) throw InputError("channel matrix contains non-finite entries");
    for (int s = 0; s < cfg.users_per_cell; ++s) {
      const int other = cfg.user_index(l, s);
      const MatrixXcd& vo = v.V[other];
      if (vo.rows() != cfg.tx_antennas || vo.cols() != mr)
        throw ConfigError("precoder dimensions do not match the configuration");
      const MatrixXcd g = hl * vo;
      if (other == user_idx) {
        signal = g;
      } else {
        f.noalias() += g * g.adjoint();
      }
    }
  }
  const MatrixXcd total = f + signal * signal.adjoint();
  const double r = hpd_logdet(total, jitter, "rate numerator") -
                   hpd_logdet(f, jitter, "rate denominator");
  return std::max(0.0, r);
}

double weighted_sum_rate(const NetworkConfig& cfg, const ChannelRealization& h,
                         const PrecoderSet& v) {
  double sum = 0.0;
  for (int u = 0; u < cfg.n_users(); ++u) {
    const double w = cfg.weight(u);
    if (w > 0.0) sum += w * instantaneous_rate(cfg, h, u, v);
  }
  return sum;
}

std::vector<McRateEstimate> monte_carlo_weighted_sum_rate_multi(
    const FadingModel& model, const NetworkConfig& cfg, const std::vector<const PrecoderSet*>& vs,
    int n_blocks, std::uint64_t seed) {
  if (n_blocks < 2) throw ConfigError("Monte-Carlo evaluation needs at least 2 blocks");
  const std::size_t nv = vs.size();
  // Welford accumulation: exact mean and exactly-zero variance for a
  // degenerate (deterministic) fading model.
  std::vector<double> mean(nv, 0.0), m2(nv, 0.0);
  std::uint64_t digest = 0xcbf29ce484222325ull;
  for (int b = 0; b < n_blocks; ++b) {
    auto rng = substream(seed, static_cast<std::uint64_t>(b));
    const ChannelRealization h = sample(model, rng);
    for (const auto& link : h.links) digest = matrix_digest(link, digest);
    for (std::size_t i = 0; i < nv; ++i) {
      const double r = weighted_sum_rate(cfg, h, *vs[i]);
      const double d1 = r - mean[i];
      mean[i] += d1 / (b + 1);
      m2[i] += d1 * (r - mean[i]);
    }
  }
  // 99% two-sided normal quantile.
  constexpr double z99 = 2.5758293035489004;
  std::vector<McRateEstimate> out(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    const double var = std::max(0.0, m2[i] / (n_blocks - 1));
    out[i] = {mean[i], z99 * std::sqrt(var / n_blocks), digest, n_blocks};
  }
  return out;
}

McRateEstimate monte_carlo_weighted_sum_rate(const FadingModel& model, const NetworkConfig& cfg,
                                             const PrecoderSet& v, int n_blocks,
                                             std::uint64_t seed) {
  return monte_carlo_weighted_sum_rate_multi(model, cfg, {&v}, n_blocks, seed)[0];
}

}  // namespace stochprec
