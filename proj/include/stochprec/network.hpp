// SPDX-License-Identifier: Apache-2.0
//
// Network data model: dimensions, channels, precoders, and cell topology.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "stochprec/linalg.hpp"

namespace stochprec {

// Power feasibility slack: sum_k Tr(V V^H) <= P * (1 + kPowerSlack).
inline constexpr double kPowerSlack = 1e-9;

struct NetworkConfig {
  int cells = 1;           // L
  int users_per_cell = 1;  // K
  int tx_antennas = 1;     // per base station
  int rx_antennas = 1;     // per user
  double power = 1.0;      // per-BS budget, watts
  double noise = 1.0;      // noise power, watts
  VectorXd weights;        // one nonnegative rate weight per user; empty means all-ones

  int n_users() const { return cells * users_per_cell; }
  int n_links() const { return n_users() * cells; }
  int user_index(int cell, int user) const { return cell * users_per_cell + user; }
  int link_index(int user_idx, int bs) const { return user_idx * cells + bs; }
  double weight(int user_idx) const { return weights.size() == 0 ? 1.0 : weights(user_idx); }

  // Throws ConfigError if any dimension or parameter is out of range.
  void validate() const;
};

// One block-fading draw: H(u, l) is the rx_antennas x tx_antennas channel
// from BS l to user u.
struct ChannelRealization {
  int cells = 0;
  std::vector<MatrixXcd> links;  // user-major: links[u * cells + l]

  const MatrixXcd& H(int user_idx, int bs) const { return links[static_cast<std::size_t>(user_idx) * cells + bs]; }
  MatrixXcd& H(int user_idx, int bs) { return links[static_cast<std::size_t>(user_idx) * cells + bs]; }

  void validate(const NetworkConfig& cfg) const;  // dimensions + finiteness
};

struct PrecoderSet {
  std::vector<MatrixXcd> V;  // one tx_antennas x rx_antennas matrix per user

  static PrecoderSet zeros(const NetworkConfig& cfg);

  double cell_power(const NetworkConfig& cfg, int cell) const;
  double total_power(const NetworkConfig& cfg) const;
  // Throws InputError if any cell exceeds the power budget beyond kPowerSlack.
  void validate(const NetworkConfig& cfg) const;
};

// BS/user placement and per-link large-scale amplitude gains.
struct Topology {
  std::vector<Eigen::Vector2d> bs_pos;
  std::vector<Eigen::Vector2d> user_pos;    // user-major
  VectorXd link_scale;                      // amplitude gain per (user, bs), user-major
  bool wrap_around = false;
  double cell_radius_m = 300.0;

  double scale(const NetworkConfig& cfg, int user_idx, int bs) const {
    return link_scale(cfg.link_index(user_idx, bs));
  }
  void validate(const NetworkConfig& cfg) const;
};

// Effective BS-to-user distance honoring toroidal wrap-around mirrors.
double link_distance_m(const Topology& topo, const Eigen::Vector2d& user, const Eigen::Vector2d& bs);

// Hexagonal layout with K users dropped uniformly per cell. Large-scale
// amplitude gain per link is 10^(-xi/10) with
//   xi = 0.5 * (128.1 + 37.6 log10(d_km) + tau),  tau ~ N(0, 8^2) dB.
// wrap_around requires cells in {1, 7}.
Topology generate_topology(const NetworkConfig& cfg, double cell_radius_m, std::uint64_t seed,
                           bool wrap_around);

}  // namespace stochprec
