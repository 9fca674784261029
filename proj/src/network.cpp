// SPDX-License-Identifier: Apache-2.0
#include "stochprec/network.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "stochprec/common.hpp"
#include "stochprec/rng.hpp"

namespace stochprec {

void NetworkConfig::validate() const {
  if (cells < 1 || users_per_cell < 1) throw ConfigError("cells and users_per_cell must be >= 1");
  if (rx_antennas < 1 || tx_antennas < rx_antennas)
    throw ConfigError("antenna counts must satisfy tx_antennas >= rx_antennas >= 1");
  if (!(power > 0.0)) throw ConfigError("power budget must be positive");
  if (!(noise > 0.0)) throw ConfigError("noise power must be positive");
  if (weights.size() != 0) {
    if (weights.size() != n_users()) throw ConfigError("weights must have one entry per user");
    if ((weights.array() < 0.0).any()) throw ConfigError("rate weights must be nonnegative");
  }
}

void ChannelRealization::validate(const NetworkConfig& cfg) const {
  if (cells != cfg.cells || links.size() != static_cast<std::size_t>(cfg.n_links()))
    throw ConfigError("channel realization does not match network dimensions");
  for (const auto& h : links) {
    if (h.rows() != cfg.rx_antennas || h.cols() != cfg.tx_antennas)
      throw ConfigError("channel matrix dimensions do not match network dimensions");
    if (!h.allFinite()) throw InputError("channel matrix contains non-finite entries");
  }
}

PrecoderSet PrecoderSet::zeros(const NetworkConfig& cfg) {
  PrecoderSet p;
  p.V.assign(cfg.n_users(), MatrixXcd::Zero(cfg.tx_antennas, cfg.rx_antennas));
  return p;
}

double PrecoderSet::cell_power(const NetworkConfig& cfg, int cell) const {
  double pw = 0.0;
  for (int k = 0; k < cfg.users_per_cell; ++k) pw += V[cfg.user_index(cell, k)].squaredNorm();
  return pw;
}

double PrecoderSet::total_power(const NetworkConfig& cfg) const {
  double pw = 0.0;
  for (int j = 0; j < cfg.cells; ++j) pw += cell_power(cfg, j);
  return pw;
}

void PrecoderSet::validate(const NetworkConfig& cfg) const {
  if (V.size() != static_cast<std::size_t>(cfg.n_users()))
    throw ConfigError("precoder set does not match user count");
  for (const auto& v : V) {
    if (v.rows() != cfg.tx_antennas || v.cols() != cfg.rx_antennas)
      throw ConfigError("precoder dimensions do not match network dimensions");
    if (!v.allFinite()) throw InputError("precoder contains non-finite entries");
  }
  for (int j = 0; j < cfg.cells; ++j) {
    const double pw = cell_power(cfg, j);
    if (pw > cfg.power * (1.0 + kPowerSlack)) {
      std::ostringstream os;
      os << "cell " << j << " exceeds the power budget: " << pw << " > " << cfg.power;
      throw InputError(os.str());
    }
  }
}

void Topology::validate(const NetworkConfig& cfg) const {
  if (bs_pos.size() != static_cast<std::size_t>(cfg.cells) ||
      user_pos.size() != static_cast<std::size_t>(cfg.n_users()) ||
      link_scale.size() != cfg.n_links())
    throw ConfigError("topology does not match network dimensions");
  for (int j = 0; j < cfg.cells; ++j) {
    for (int k = 0; k < cfg.users_per_cell; ++k) {
      const int u = cfg.user_index(j, k);
      const double d = link_distance_m(*this, user_pos[u], bs_pos[j]);
      if (!(d > 0.0)) throw ConfigError("BS-user distance must be positive");
      if (d > cell_radius_m * (1.0 + 1e-12)) throw ConfigError("user outside its serving cell radius");
    }
  }
  if ((link_scale.array() <= 0.0).any()) throw ConfigError("link scales must be positive");
}

namespace {

// Wrap-around mirror displacements for the 7-cell cluster: the zero shift
// plus six lattice vectors of length sqrt(7) * inter_site, 60 degrees apart.
std::vector<Eigen::Vector2d> mirror_offsets(bool wrap_around, int cells, double inter_site) {
  std::vector<Eigen::Vector2d> offsets{{0.0, 0.0}};
  if (!wrap_around || cells != 7) return offsets;
  const double r = std::sqrt(7.0) * inter_site;
  const double base = std::atan2(std::numbers::sqrt3, 2.0);  // direction of a1 + 2*a2
  for (int n = 0; n < 6; ++n) {
    const double th = base + n * std::numbers::pi / 3.0;
    offsets.emplace_back(r * std::cos(th), r * std::sin(th));
  }
  return offsets;
}

// Uniform draw inside a flat-topped hexagon of circumradius R centered at c.
Eigen::Vector2d uniform_in_hexagon(RngStream& rng, const Eigen::Vector2d& c, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  const double half_height = radius * std::numbers::sqrt3 / 2.0;
  for (;;) {
    const double x = u(rng);
    const double y = u(rng);
    if (std::abs(y) > half_height) continue;
    if (std::abs(y) > std::numbers::sqrt3 * (radius - std::abs(x))) continue;
    if (x == 0.0 && y == 0.0) continue;  // distance must stay positive
    return c + Eigen::Vector2d(x, y);
  }
}

}  // namespace

double link_distance_m(const Topology& topo, const Eigen::Vector2d& user, const Eigen::Vector2d& bs) {
  const double inter_site = topo.cell_radius_m * std::numbers::sqrt3;
  double best = (user - bs).norm();
  for (const auto& off : mirror_offsets(topo.wrap_around, static_cast<int>(topo.bs_pos.size()), inter_site)) {
    best = std::min(best, (user - (bs + off)).norm());
  }
  return best;
}

Topology generate_topology(const NetworkConfig& cfg, double cell_radius_m, std::uint64_t seed,
                           bool wrap_around) {
  cfg.validate();
  if (!(cell_radius_m > 0.0)) throw ConfigError("cell radius must be positive");
  if (wrap_around && cfg.cells != 1 && cfg.cells != 7)
    throw ConfigError("wrap-around layout is defined for 1 or 7 cells");

  Topology topo;
  topo.wrap_around = wrap_around;
  topo.cell_radius_m = cell_radius_m;

  // Hexagonal flower: center cell plus up to 6 first-ring neighbors.
  const double inter_site = cell_radius_m * std::numbers::sqrt3;
  topo.bs_pos.emplace_back(0.0, 0.0);
  for (int n = 1; n < cfg.cells; ++n) {
    const double th = std::numbers::pi / 6.0 + (n - 1) * std::numbers::pi / 3.0;
    if (n <= 6) {
      topo.bs_pos.emplace_back(inter_site * std::cos(th), inter_site * std::sin(th));
    } else {
      throw ConfigError("layouts beyond 7 cells are not supported");
    }
  }

  auto rng = substream(seed, 0x70b0);
  topo.user_pos.resize(cfg.n_users());
  for (int j = 0; j < cfg.cells; ++j)
    for (int k = 0; k < cfg.users_per_cell; ++k)
      topo.user_pos[cfg.user_index(j, k)] = uniform_in_hexagon(rng, topo.bs_pos[j], cell_radius_m);

  // Per-link shadowing is drawn once here and stays fixed for this topology.
  std::normal_distribution<double> shadow(0.0, 8.0);
  topo.link_scale.resize(cfg.n_links());
  for (int u = 0; u < cfg.n_users(); ++u) {
    for (int l = 0; l < cfg.cells; ++l) {
      const double d_km = link_distance_m(topo, topo.user_pos[u], topo.bs_pos[l]) / 1000.0;
      const double xi = 0.5 * (128.1 + 37.6 * std::log10(d_km) + shadow(rng));
      topo.link_scale(cfg.link_index(u, l)) = std::pow(10.0, -xi / 10.0);
    }
  }

  topo.validate(cfg);
  return topo;
}

}  // namespace stochprec
