// SPDX-License-Identifier: Apache-2.0
#include "stochprec/fast_solver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "stochprec/common.hpp"

namespace stochprec {

namespace {
constexpr double kAlphaInflation = 1.0 + 1e-9;
}

std::vector<double> alpha_from_xi(const std::vector<MatrixXcd>& xi) {
  std::vector<double> alpha(xi.size());
  for (std::size_t j = 0; j < xi.size(); ++j) alpha[j] = hermitian_lmax(xi[j]) * kAlphaInflation;
  return alpha;
}

std::pair<std::vector<MatrixXcd>, std::vector<double>> compute_Xi_alpha(
    const NetworkConfig& cfg, const std::vector<std::vector<MatrixXcd>>& lambdas) {
  std::vector<MatrixXcd> xi(cfg.cells,
                            MatrixXcd::Zero(cfg.tx_antennas, cfg.tx_antennas));
  for (int j = 0; j < cfg.cells; ++j)
    for (int u = 0; u < cfg.n_users(); ++u) xi[j] += cfg.weight(u) * lambdas[j][u];
  for (auto& x : xi) x = hermitize(x);
  return {xi, alpha_from_xi(xi)};
}

std::vector<MatrixXcd> update_V_cell_fast(const std::vector<MatrixXcd>& targets,
                                          const std::vector<MatrixXcd>& z, const MatrixXcd& xi,
                                          double alpha, double power_budget) {
  const int k = static_cast<int>(targets.size());
  std::vector<MatrixXcd> psi(k);
  double pw = 0.0;
  if (alpha == 0.0) {
    // Xi = 0: the quadratic term vanishes and the subproblem is linear, so
    // the optimum sits on the power boundary along the targets.
    for (int i = 0; i < k; ++i) pw += targets[i].squaredNorm();
    if (pw == 0.0) {
      for (int i = 0; i < k; ++i) psi[i] = MatrixXcd::Zero(targets[i].rows(), targets[i].cols());
      return psi;
    }
    const double scale = std::sqrt(power_budget / pw);
    for (int i = 0; i < k; ++i) psi[i] = scale * targets[i];
    return psi;
  }
  for (int i = 0; i < k; ++i) {
    if (!targets[i].allFinite()) throw InputError("precoder update target is not finite");
    psi[i] = z[i] + (targets[i] - xi * z[i]) / alpha;
    pw += psi[i].squaredNorm();
  }
  if (pw > power_budget) {
    const double beta = std::sqrt(power_budget / pw);
    for (auto& p : psi) p *= beta;
  }
  return psi;
}

double objective_zeta(const NetworkConfig& cfg, const ChannelMoments& moments,
                      const PrecoderSet& v, const AuxState& aux, const FastAuxState& fast) {
  const int mr = cfg.rx_antennas;
  const MatrixXcd eye = MatrixXcd::Identity(mr, mr);
  double value = 0.0;
  for (int j = 0; j < cfg.cells; ++j) {
    const MatrixXcd& xi = fast.xi[j];
    const double alpha = fast.alpha[j];
    for (int k = 0; k < cfg.users_per_cell; ++k) {
      const int u = cfg.user_index(j, k);
      const double w = cfg.weight(u);
      const MatrixXcd& gamma = aux.gamma[u];
      const MatrixXcd& y = aux.y[u];
      const MatrixXcd& vu = v.V[u];
      const MatrixXcd& zu = fast.z[u];
      const MatrixXcd ig = eye + gamma;
      if (w != 0.0) {
        value += w * (hpd_logdet(ig, 0.0, "log of I+Gamma") - std::real(gamma.trace()));
        value += 2.0 * w *
                 std::real((ig * vu.adjoint() * moments.C(u).adjoint() * y).trace());
        value -= w * cfg.noise * std::real((ig * y.adjoint() * y).trace());
      }
      const MatrixXcd xz = xi * zu;
      value += 2.0 * std::real((vu.adjoint() * (alpha * zu - xz)).trace());
      value += std::real((zu.adjoint() * (xz - alpha * zu)).trace());
      value -= alpha * vu.squaredNorm();
    }
  }
  return value;
}

FastSolveResult run_algorithm2(const ChannelMoments& moments, const NetworkConfig& cfg,
                               const PrecoderSet& init, const StopRule& stop, bool log_sandwich) {
  cfg.validate();
  moments.validate();
  init.validate(cfg);
  const MomentWorkspace workspace(moments, cfg);
  const int mr = cfg.rx_antennas;
  const MatrixXcd eye = MatrixXcd::Identity(mr, mr);

  FastSolveResult res;
  res.precoders = init;
  res.aux.gamma.assign(cfg.n_users(), MatrixXcd::Zero(mr, mr));
  res.aux.y.assign(cfg.n_users(), MatrixXcd::Zero(mr, mr));
  res.fast.z.assign(cfg.n_users(), MatrixXcd::Zero(cfg.tx_antennas, mr));
  res.fast.xi.assign(cfg.cells, MatrixXcd::Zero(cfg.tx_antennas, cfg.tx_antennas));
  res.fast.alpha.assign(cfg.cells, 0.0);

  std::vector<MatrixXcd> u_totals = workspace.u_totals(cell_grams(cfg, res.precoders));
  for (int t = 0; t < stop.max_iters; ++t) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      std::vector<MatrixXcd> weighted_kernels(cfg.n_users());
      for (int u = 0; u < cfg.n_users(); ++u) {
        res.aux.y[u] = update_Y(moments.C(u), res.precoders.V[u], u_totals[u], cfg.noise);
        res.aux.gamma[u] = update_Gamma(moments.C(u), res.precoders.V[u], u_totals[u], cfg.noise);
        res.fast.z[u] = update_Z(res.precoders.V[u]);
        weighted_kernels[u] = cfg.weight(u) * res.aux.y[u] * (eye + res.aux.gamma[u]) *
                              res.aux.y[u].adjoint();
      }
      res.fast.xi = workspace.xi_totals(weighted_kernels);
      res.fast.alpha = alpha_from_xi(res.fast.xi);

      double fhat_mid = 0.0;
      if (log_sandwich)
        fhat_mid = objective_fhat(cfg, moments, res.precoders, res.aux, u_totals);

      for (int j = 0; j < cfg.cells; ++j) {
        std::vector<MatrixXcd> targets(cfg.users_per_cell), z_cell(cfg.users_per_cell);
        for (int k = 0; k < cfg.users_per_cell; ++k) {
          const int u = cfg.user_index(j, k);
          targets[k] = cfg.weight(u) * moments.C(u).adjoint() * res.aux.y[u] *
                       (eye + res.aux.gamma[u]);
          z_cell[k] = res.fast.z[u];
        }
        const std::vector<MatrixXcd> v_cell =
            update_V_cell_fast(targets, z_cell, res.fast.xi[j], res.fast.alpha[j], cfg.power);
        for (int k = 0; k < cfg.users_per_cell; ++k)
          res.precoders.V[cfg.user_index(j, k)] = v_cell[k];
      }
      u_totals = workspace.u_totals(cell_grams(cfg, res.precoders));
      const double fhat_new =
          objective_fhat(cfg, moments, res.precoders, res.aux, u_totals);
      res.trace.objective.push_back(fhat_new);
      if (log_sandwich) {
        const double zeta_new = objective_zeta(cfg, moments, res.precoders, res.aux, res.fast);
        res.trace.sandwich.push_back({fhat_mid, zeta_new, fhat_new});
      }
    } catch (const NumericalError& e) {
      std::ostringstream os;
      os << "iteration " << t + 1 << ": " << e.what();
      throw NumericalError(os.str());
    }
    res.trace.iter_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

    const std::size_t n = res.trace.objective.size();
    if (n >= 2) {
      const double prev = res.trace.objective[n - 2];
      const double cur = res.trace.objective[n - 1];
      if (std::abs(cur - prev) < stop.tol * std::max(1e-300, std::abs(prev))) {
        res.trace.stop = StopReason::kConverged;
        break;
      }
    }
  }
  return res;
}

}  // namespace stochprec
