// SPDX-License-Identifier: Apache-2.0
#include "stochprec/fading.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <type_traits>

#include "stochprec/common.hpp"

namespace stochprec {

namespace {

void check_link_shapes(int users, int cells, std::size_t n_static, std::size_t n_scale) {
  const auto links = static_cast<std::size_t>(users) * static_cast<std::size_t>(cells);
  if (users < 1 || cells < 1) throw ConfigError("fading model needs at least one user and one cell");
  if (n_static != links || n_scale != links)
    throw ConfigError("fading model link arrays do not match user/cell counts");
}

void check_rho(const std::vector<double>& rho) {
  for (double r : rho)
    if (!(r > 0.0) || r > 1.0) throw ConfigError("rho must lie in (0, 1]");
}

}  // namespace

void GaussianFadingModel::validate() const {
  check_link_shapes(n_users(), cells, static_part.size(), scale.size());
  check_rho(rho);
  for (std::size_t i = 0; i < scale.size(); ++i) {
    if ((scale[i].array() < 0.0).any()) throw ConfigError("scale mask entries must be nonnegative");
    if (scale[i].rows() != static_part[i].rows() || scale[i].cols() != static_part[i].cols())
      throw ConfigError("scale mask and static component dimensions differ");
  }
}

void NakagamiFadingModel::validate() const {
  check_link_shapes(n_users(), cells, static_part.size(), mean_power.size());
  check_rho(rho);
  if (!(shape >= 0.5)) throw ConfigError("Nakagami shape must be >= 0.5");
  for (std::size_t i = 0; i < mean_power.size(); ++i) {
    if ((mean_power[i].array() <= 0.0).any()) throw ConfigError("mean-power entries must be positive");
    if (mean_power[i].rows() != static_part[i].rows() || mean_power[i].cols() != static_part[i].cols())
      throw ConfigError("mean-power and static component dimensions differ");
  }
}

ChannelRealization sample_gaussian(const GaussianFadingModel& model, RngStream& rng) {
  ChannelRealization h;
  h.cells = model.cells;
  h.links.reserve(model.static_part.size());
  for (int u = 0; u < model.n_users(); ++u) {
    const double rho = model.rho[u];
    const double mix = std::sqrt(1.0 - rho * rho);
    for (int l = 0; l < model.cells; ++l) {
      const std::size_t i = static_cast<std::size_t>(u) * model.cells + l;
      MatrixXcd x(model.static_part[i].rows(), model.static_part[i].cols());
      for (Eigen::Index c = 0; c < x.cols(); ++c)
        for (Eigen::Index r = 0; r < x.rows(); ++r) x(r, c) = complex_gaussian(rng);
      h.links.push_back(rho * model.static_part[i] +
                        mix * model.scale[i].cast<Complex>().cwiseProduct(x));
    }
  }
  return h;
}

ChannelRealization sample_nakagami(const NakagamiFadingModel& model, RngStream& rng) {
  ChannelRealization h;
  h.cells = model.cells;
  h.links.reserve(model.static_part.size());
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (int u = 0; u < model.n_users(); ++u) {
    const double rho = model.rho[u];
    const double mix = std::sqrt(1.0 - rho * rho);
    for (int l = 0; l < model.cells; ++l) {
      const std::size_t i = static_cast<std::size_t>(u) * model.cells + l;
      MatrixXcd m(model.static_part[i].rows(), model.static_part[i].cols());
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
          // |M|^2 ~ Gamma(shape, Omega/shape), phase uniform on (0, 2pi].
          std::gamma_distribution<double> g(model.shape, model.mean_power[i](r, c) / model.shape);
          const double mag = std::sqrt(g(rng));
          const double th = phase(rng);
          m(r, c) = Complex(mag * std::cos(th), mag * std::sin(th));
        }
      }
      h.links.push_back(rho * model.static_part[i] + mix * m);
    }
  }
  return h;
}

ChannelRealization sample(const FadingModel& model, RngStream& rng) {
  return std::visit(
      [&rng](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, GaussianFadingModel>) {
          return sample_gaussian(m, rng);
        } else {
          return sample_nakagami(m, rng);
        }
      },
      model);
}

double jakes_rho(double doppler_hz, double interval_s) {
  if (doppler_hz < 0.0 || interval_s < 0.0) throw InputError("Doppler and interval must be >= 0");
  const double x = 2.0 * std::numbers::pi * doppler_hz * interval_s;
  const double j0 = std::cyl_bessel_j(0.0, x);
  return std::clamp(j0, 1e-6, 1.0);
}

namespace {

std::vector<MatrixXcd> draw_static_parts(const NetworkConfig& cfg, const Topology& topo,
                                         std::uint64_t seed, bool nakagami, double shape) {
  // One realization of the random component, fixed for the lifetime of the
  // model (a rho=1 snapshot of the fading process).
  auto rng = substream(seed, 0x5747);
  std::vector<MatrixXcd> hbar(cfg.n_links());
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (int u = 0; u < cfg.n_users(); ++u) {
    for (int l = 0; l < cfg.cells; ++l) {
      const double w = topo.scale(cfg, u, l);
      MatrixXcd m(cfg.rx_antennas, cfg.tx_antennas);
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
          if (nakagami) {
            std::gamma_distribution<double> g(shape, w * w / shape);
            const double mag = std::sqrt(g(rng));
            const double th = phase(rng);
            m(r, c) = Complex(mag * std::cos(th), mag * std::sin(th));
          } else {
            m(r, c) = w * complex_gaussian(rng);
          }
        }
      }
      hbar[cfg.link_index(u, l)] = std::move(m);
    }
  }
  return hbar;
}

}  // namespace

GaussianFadingModel make_gaussian_model(const NetworkConfig& cfg, const Topology& topo, double rho,
                                        std::uint64_t seed) {
  cfg.validate();
  topo.validate(cfg);
  GaussianFadingModel model;
  model.cells = cfg.cells;
  model.static_part = draw_static_parts(cfg, topo, seed, false, 0.0);
  model.scale.resize(cfg.n_links());
  for (int u = 0; u < cfg.n_users(); ++u)
    for (int l = 0; l < cfg.cells; ++l)
      model.scale[cfg.link_index(u, l)] =
          MatrixXd::Constant(cfg.rx_antennas, cfg.tx_antennas, topo.scale(cfg, u, l));
  model.rho.assign(cfg.n_users(), rho);
  model.validate();
  return model;
}

NakagamiFadingModel make_nakagami_model(const NetworkConfig& cfg, const Topology& topo, double rho,
                                        double shape, std::uint64_t seed) {
  cfg.validate();
  topo.validate(cfg);
  NakagamiFadingModel model;
  model.cells = cfg.cells;
  model.shape = shape;
  model.static_part = draw_static_parts(cfg, topo, seed, true, shape);
  model.mean_power.resize(cfg.n_links());
  for (int u = 0; u < cfg.n_users(); ++u)
    for (int l = 0; l < cfg.cells; ++l) {
      const double w = topo.scale(cfg, u, l);
      model.mean_power[cfg.link_index(u, l)] =
          MatrixXd::Constant(cfg.rx_antennas, cfg.tx_antennas, w * w);
    }
  model.rho.assign(cfg.n_users(), rho);
  model.validate();
  return model;
}

std::vector<MatrixXcd> mean_channels(const FadingModel& model) {
  return std::visit(
      [](const auto& m) {
        std::vector<MatrixXcd> out(m.static_part.size());
        for (int u = 0; u < m.n_users(); ++u)
          for (int l = 0; l < m.cells; ++l) {
            const std::size_t i = static_cast<std::size_t>(u) * m.cells + l;
            out[i] = m.rho[u] * m.static_part[i];
          }
        return out;
      },
      model);
}

const std::vector<MatrixXcd>& static_components(const FadingModel& model) {
  return std::visit([](const auto& m) -> const std::vector<MatrixXcd>& { return m.static_part; },
                    model);
}

}  // namespace stochprec
