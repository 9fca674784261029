// SPDX-License-Identifier: Apache-2.0
//
// Fading-channel models. Both families share the block structure
//   H = rho * Hbar + sqrt(1 - rho^2) * R,
// where Hbar is a fixed static component and R is a zero-mean random matrix
// with independent entries: Gaussian (R = W .* X, X ~ CN(0,1)) or
// Nakagami-m (uniform phase, Gamma-distributed squared magnitude).
#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "stochprec/network.hpp"
#include "stochprec/rng.hpp"

namespace stochprec {

struct GaussianFadingModel {
  int cells = 1;
  std::vector<MatrixXcd> static_part;  // Hbar per link, user-major
  std::vector<MatrixXd> scale;         // W per link, entrywise std of the random part
  std::vector<double> rho;             // temporal correlation per user, in (0, 1]

  int n_users() const { return static_cast<int>(rho.size()); }
  void validate() const;
};

struct NakagamiFadingModel {
  int cells = 1;
  std::vector<MatrixXcd> static_part;
  double shape = 0.5;                 // Nakagami m, >= 0.5
  std::vector<MatrixXd> mean_power;   // Omega per link: E|R_mn|^2
  std::vector<double> rho;

  int n_users() const { return static_cast<int>(rho.size()); }
  void validate() const;
};

using FadingModel = std::variant<GaussianFadingModel, NakagamiFadingModel>;

ChannelRealization sample_gaussian(const GaussianFadingModel& model, RngStream& rng);
ChannelRealization sample_nakagami(const NakagamiFadingModel& model, RngStream& rng);
ChannelRealization sample(const FadingModel& model, RngStream& rng);

// Temporal correlation from the Doppler model: rho = J0(2 pi f_d T),
// clipped into (1e-6, 1].
double jakes_rho(double doppler_hz, double interval_s);

// Builds a fading model on the given topology: per-link scale matrices are
// the topology's large-scale gains, and the static component is one draw of
// the random part (fixed thereafter). Deterministic given the seed.
GaussianFadingModel make_gaussian_model(const NetworkConfig& cfg, const Topology& topo, double rho,
                                        std::uint64_t seed);
NakagamiFadingModel make_nakagami_model(const NetworkConfig& cfg, const Topology& topo, double rho,
                                        double shape, std::uint64_t seed);

// Mean channel of every link, rho * Hbar. Used by deterministic baselines.
std::vector<MatrixXcd> mean_channels(const FadingModel& model);
// Static components Hbar as given (no rho weighting).
const std::vector<MatrixXcd>& static_components(const FadingModel& model);

}  // namespace stochprec
