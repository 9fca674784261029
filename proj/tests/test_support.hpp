// SPDX-License-Identifier: Apache-2.0
//
// Test-only helpers: independent oracles (kept away from the library code
// paths they check) and seeded random instance generators.
#pragma once

#include <cmath>
#include <random>

#include "stochprec/fading.hpp"
#include "stochprec/moments.hpp"
#include "stochprec/network.hpp"
#include "stochprec/rng.hpp"

namespace testsupport {

using namespace stochprec;

// --- Oracles ---------------------------------------------------------------

// Order-zero Bessel J0 by its power series, in extended precision. Converges
// quickly for the |x| <= 8 arguments used in tests.
inline double bessel_j0_series(double x) {
  const long double q = static_cast<long double>(x) * x / 4.0L;
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 80; ++k) {
    term *= -q / (static_cast<long double>(k) * k);
    sum += term;
    if (std::abs(static_cast<double>(term)) < 1e-30) break;
  }
  return static_cast<double>(sum);
}

// Single-user MIMO capacity under a total power constraint, by SVD plus
// bisection on the water level. Nats.
inline double waterfilling_capacity(const MatrixXcd& c, double power, double sigma2) {
  Eigen::JacobiSVD<MatrixXcd> svd(c);
  const VectorXd sv = svd.singularValues();
  std::vector<double> inv_gain;  // sigma^2 / s_i^2 for usable streams
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-13 * sv(0)) inv_gain.push_back(sigma2 / (sv(i) * sv(i)));
  }
  if (inv_gain.empty()) return 0.0;
  auto allocated = [&](double level) {
    double total = 0.0;
    for (double ig : inv_gain) total += std::max(0.0, level - ig);
    return total;
  };
  double lo = 0.0, hi = power + *std::max_element(inv_gain.begin(), inv_gain.end());
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (allocated(mid) > power ? hi : lo) = mid;
  }
  const double level = 0.5 * (lo + hi);
  double cap = 0.0;
  for (double ig : inv_gain) {
    const double p = std::max(0.0, level - ig);
    cap += std::log(1.0 + p / ig);
  }
  return cap;
}

// --- Random instances ------------------------------------------------------

inline MatrixXcd random_complex(RngStream& rng, int rows, int cols, double scale = 1.0) {
  MatrixXcd m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = scale * complex_gaussian(rng);
  return m;
}

inline MatrixXcd random_hermitian_psd(RngStream& rng, int n, double scale = 1.0) {
  const MatrixXcd g = random_complex(rng, n, n, scale);
  return g * g.adjoint() / double(n);
}

inline MatrixXcd random_unitary(RngStream& rng, int n) {
  const MatrixXcd g = random_complex(rng, n, n);
  return Eigen::HouseholderQR<MatrixXcd>(g).householderQ();
}

struct Instance {
  NetworkConfig net;
  FadingModel model;
  ChannelMoments moments;
};

inline NetworkConfig random_net(RngStream& rng, int cells, int users_per_cell, int tx, int rx,
                                bool random_weights = false) {
  NetworkConfig net;
  net.cells = cells;
  net.users_per_cell = users_per_cell;
  net.tx_antennas = tx;
  net.rx_antennas = rx;
  std::uniform_real_distribution<double> pu(2.0, 8.0), nu(0.05, 0.5);
  net.power = pu(rng);
  net.noise = nu(rng);
  if (random_weights) {
    std::uniform_real_distribution<double> wu(0.5, 2.0);
    net.weights.resize(net.n_users());
    for (int u = 0; u < net.n_users(); ++u) net.weights(u) = wu(rng);
  }
  return net;
}

inline GaussianFadingModel random_gaussian_model(RngStream& rng, const NetworkConfig& net) {
  GaussianFadingModel m;
  m.cells = net.cells;
  std::uniform_real_distribution<double> au(-1.2, 0.0), wu(0.5, 1.5), ru(0.3, 0.9);
  for (int u = 0; u < net.n_users(); ++u) {
    m.rho.push_back(ru(rng));
    for (int l = 0; l < net.cells; ++l) {
      const double amp = std::exp(au(rng));
      m.static_part.push_back(random_complex(rng, net.rx_antennas, net.tx_antennas, amp));
      MatrixXd w(net.rx_antennas, net.tx_antennas);
      for (int c = 0; c < w.cols(); ++c)
        for (int r = 0; r < w.rows(); ++r) w(r, c) = amp * wu(rng);
      m.scale.push_back(std::move(w));
    }
  }
  m.validate();
  return m;
}

inline NakagamiFadingModel random_nakagami_model(RngStream& rng, const NetworkConfig& net) {
  NakagamiFadingModel m;
  m.cells = net.cells;
  std::uniform_real_distribution<double> au(-1.2, 0.0), ou(0.3, 2.0), ru(0.3, 0.9), mu(0.5, 3.0);
  m.shape = mu(rng);
  for (int u = 0; u < net.n_users(); ++u) {
    m.rho.push_back(ru(rng));
    for (int l = 0; l < net.cells; ++l) {
      const double amp = std::exp(au(rng));
      m.static_part.push_back(random_complex(rng, net.rx_antennas, net.tx_antennas, amp));
      MatrixXd om(net.rx_antennas, net.tx_antennas);
      for (int c = 0; c < om.cols(); ++c)
        for (int r = 0; r < om.rows(); ++r) om(r, c) = amp * amp * ou(rng);
      m.mean_power.push_back(std::move(om));
    }
  }
  m.validate();
  return m;
}

// Small synthetic network with analytic moments; alternates fading family.
inline Instance random_instance(std::uint64_t seed, bool nakagami, int cells = 0) {
  auto rng = make_rng(seed);
  std::uniform_int_distribution<int> lu(1, 2), ku(1, 3), mtu(2, 5);
  const int l = cells > 0 ? cells : lu(rng);
  const int k = ku(rng);
  const int mr = 1 + (static_cast<int>(rng() % 2));
  const int mt = std::max(mr, mtu(rng));
  Instance inst;
  inst.net = random_net(rng, l, k, mt, mr, (seed % 3) == 0);
  if (nakagami) {
    inst.model = random_nakagami_model(rng, inst.net);
  } else {
    inst.model = random_gaussian_model(rng, inst.net);
  }
  inst.moments = analytic_moments(inst.model);
  return inst;
}

// Random precoders scaled onto the power boundary of every cell.
inline PrecoderSet random_feasible_precoder(RngStream& rng, const NetworkConfig& net) {
  PrecoderSet p = PrecoderSet::zeros(net);
  for (int u = 0; u < net.n_users(); ++u)
    p.V[u] = random_complex(rng, net.tx_antennas, net.rx_antennas);
  for (int j = 0; j < net.cells; ++j) {
    const double pw = p.cell_power(net, j);
    const double scale = std::sqrt(net.power / pw);
    for (int k = 0; k < net.users_per_cell; ++k) p.V[net.user_index(j, k)] *= scale;
  }
  return p;
}

}  // namespace testsupport
