// SPDX-License-Identifier: Apache-2.0
#include "stochprec/moments.hpp"

#include <Eigen/Cholesky>
#include <iostream>

#include "stochprec/common.hpp"

namespace stochprec {

namespace {

// PSD check with relative slack: A + slack*trace*I must admit a Cholesky.
bool is_psd(const MatrixXcd& a, double slack) {
  const double shift = slack * std::max(a.trace().real(), 1e-300);
  Eigen::LLT<MatrixXcd> llt(a + shift * MatrixXcd::Identity(a.rows(), a.cols()));
  return llt.info() == Eigen::Success;
}

}  // namespace

void ChannelMoments::validate() const {
  if (cells < 1 || rx_antennas < 1 || tx_antennas < 1) throw ConfigError("bad moment dimensions");
  if (second.size() != static_cast<std::size_t>(n_users()) * cells)
    throw ConfigError("second-moment count does not match users x cells");
  const Eigen::Index dim = static_cast<Eigen::Index>(rx_antennas) * tx_antennas;
  for (int u = 0; u < n_users(); ++u) {
    if (mean[u].rows() != rx_antennas || mean[u].cols() != tx_antennas)
      throw ConfigError("first-moment dimensions do not match");
    if (!mean[u].allFinite()) throw InputError("first moment contains non-finite entries");
    for (int l = 0; l < cells; ++l) {
      const MatrixXcd& d = D(u, l);
      if (d.rows() != dim || d.cols() != dim) throw ConfigError("second-moment dimensions do not match");
      if (!d.allFinite()) throw InputError("second moment contains non-finite entries");
      if ((d - d.adjoint()).norm() > 1e-9 * std::max(1.0, d.norm()))
        throw InputError("second moment is not Hermitian");
      if (!is_psd(d, 1e-9)) throw InputError("second moment is not positive semidefinite");
    }
  }
  // Covariance of the direct link must be PSD: D_{jk,j} >= vec(C) vec(C)^H.
  for (int u = 0; u < n_users(); ++u) {
    const int serving = (cells == 1) ? 0 : u / (n_users() / cells);
    const VectorXcd c = vec(mean[u]);
    const MatrixXcd cov = D(u, serving) - c * c.adjoint();
    if (!is_psd(cov, 1e-9))
      throw InputError("direct-link second moment does not dominate the squared mean");
  }
}

ChannelMoments analytic_moments(const FadingModel& model) {
  return std::visit(
      [](const auto& m) {
        m.validate();
        using T = std::decay_t<decltype(m)>;
        ChannelMoments mom;
        mom.cells = m.cells;
        const int users = m.n_users();
        const int users_per_cell = users / m.cells;
        mom.rx_antennas = static_cast<int>(m.static_part[0].rows());
        mom.tx_antennas = static_cast<int>(m.static_part[0].cols());
        mom.mean.resize(users);
        mom.second.resize(m.static_part.size());
        for (int u = 0; u < users; ++u) {
          const double rho = m.rho[u];
          const int serving = u / users_per_cell;
          for (int l = 0; l < m.cells; ++l) {
            const std::size_t i = static_cast<std::size_t>(u) * m.cells + l;
            const MatrixXcd mean_link = rho * m.static_part[i];
            MatrixXd var;  // entrywise variance of the random part
            if constexpr (std::is_same_v<T, GaussianFadingModel>) {
              var = m.scale[i].array().square();
            } else {
              var = m.mean_power[i];
            }
            const VectorXcd mv = vec(mean_link);
            MatrixXcd d = mv * mv.adjoint();
            const double mix = 1.0 - rho * rho;
            const Eigen::Map<const VectorXd> vv(var.data(), var.size());
            d.diagonal() += (mix * vv).cast<Complex>();
            mom.second[i] = std::move(d);
            if (l == serving) mom.mean[u] = mean_link;
          }
        }
        return mom;
      },
      model);
}

ChannelMoments empirical_moments(const FadingModel& model, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw ConfigError("empirical moments need at least one sample");
  ChannelMoments mom;
  auto rng = make_rng(seed);
  ChannelRealization first = sample(model, rng);
  mom.cells = first.cells;
  const int users = static_cast<int>(first.links.size()) / first.cells;
  const int users_per_cell = users / first.cells;
  mom.rx_antennas = static_cast<int>(first.links[0].rows());
  mom.tx_antennas = static_cast<int>(first.links[0].cols());
  if (n_samples < mom.rx_antennas * mom.tx_antennas)
    std::cerr << "stochprec: warning: " << n_samples
              << " samples give a rank-deficient second moment\n";

  const Eigen::Index dim = static_cast<Eigen::Index>(mom.rx_antennas) * mom.tx_antennas;
  std::vector<MatrixXcd> mean_acc(first.links.size(),
                                  MatrixXcd::Zero(mom.rx_antennas, mom.tx_antennas));
  mom.second.assign(first.links.size(), MatrixXcd::Zero(dim, dim));

  for (int s = 0; s < n_samples; ++s) {
    const ChannelRealization block = (s == 0) ? std::move(first) : sample(model, rng);
    for (std::size_t i = 0; i < block.links.size(); ++i) {
      mean_acc[i] += block.links[i];
      const VectorXcd v = vec(block.links[i]);
      mom.second[i] += v * v.adjoint();
    }
  }
  mom.mean.resize(users);
  for (int u = 0; u < users; ++u) {
    const int serving = u / users_per_cell;
    mom.mean[u] = mean_acc[static_cast<std::size_t>(u) * mom.cells + serving] / double(n_samples);
  }
  for (auto& d : mom.second) d = hermitize(d / double(n_samples));
  return mom;
}

ChannelMoments deterministic_moments(const std::vector<MatrixXcd>& channels, int cells) {
  if (cells < 1 || channels.empty() || channels.size() % cells != 0)
    throw ConfigError("channel count must be a positive multiple of the cell count");
  ChannelMoments mom;
  mom.cells = cells;
  const int users = static_cast<int>(channels.size()) / cells;
  const int users_per_cell = users / cells;
  if (users_per_cell * cells != users) throw ConfigError("users must divide evenly across cells");
  mom.rx_antennas = static_cast<int>(channels[0].rows());
  mom.tx_antennas = static_cast<int>(channels[0].cols());
  mom.mean.resize(users);
  mom.second.resize(channels.size());
  for (int u = 0; u < users; ++u) {
    const int serving = u / users_per_cell;
    for (int l = 0; l < cells; ++l) {
      const std::size_t i = static_cast<std::size_t>(u) * cells + l;
      const VectorXcd v = vec(channels[i]);
      mom.second[i] = v * v.adjoint();
      if (l == serving) mom.mean[u] = channels[i];
    }
  }
  return mom;
}

}  // namespace stochprec
