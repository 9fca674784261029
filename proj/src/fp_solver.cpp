// SPDX-License-Identifier: Apache-2.0
#include "stochprec/fp_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "stochprec/common.hpp"

namespace stochprec {

bool SolveTrace::nondecreasing(double rel_slack) const {
  for (std::size_t t = 1; t < objective.size(); ++t) {
    if (objective[t] < objective[t - 1] - rel_slack * std::abs(objective[t - 1])) return false;
  }
  return true;
}

double SolveTrace::median_iter_seconds() const {
  if (iter_seconds.empty()) return 0.0;
  std::vector<double> s = iter_seconds;
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  return (n % 2 == 1) ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

// --- Moment contractions -------------------------------------------------

MatrixXcd contract_tx_kernel(const MatrixXcd& q, const MatrixXcd& d, int rx_antennas) {
  const int mr = rx_antennas;
  const int mt = static_cast<int>(q.rows());
  if (q.cols() != mt || d.rows() != static_cast<Eigen::Index>(mr) * mt || d.cols() != d.rows())
    throw ConfigError("contraction dimensions do not match");
  MatrixXcd u = MatrixXcd::Zero(mr, mr);
  for (int mp = 0; mp < mt; ++mp)
    for (int np = 0; np < mt; ++np) u.noalias() += q(mp, np) * d.block(mp * mr, np * mr, mr, mr);
  return hermitize(u);
}

MatrixXcd compute_U(const MatrixXcd& v, const MatrixXcd& d, int rx_antennas) {
  return contract_tx_kernel(v * v.adjoint(), d, rx_antennas);
}

MatrixXcd contract_rx_kernel(const MatrixXcd& k, const MatrixXcd& d, int rx_antennas) {
  const int mr = rx_antennas;
  if (k.rows() != mr || k.cols() != mr || d.rows() % mr != 0 || d.cols() != d.rows())
    throw ConfigError("contraction dimensions do not match");
  const int mt = static_cast<int>(d.rows()) / mr;
  MatrixXcd lam(mt, mt);
  for (int m = 0; m < mt; ++m)
    for (int n = 0; n < mt; ++n)
      lam(m, n) = d.block(m * mr, n * mr, mr, mr).conjugate().cwiseProduct(k).sum();
  return hermitize(lam);
}

MatrixXcd compute_Lambda(const MatrixXcd& y, const MatrixXcd& gamma, const MatrixXcd& d,
                         int rx_antennas) {
  const MatrixXcd k =
      y * (MatrixXcd::Identity(gamma.rows(), gamma.cols()) + gamma) * y.adjoint();
  return contract_rx_kernel(k, d, rx_antennas);
}

MatrixXcd compute_U_gaussian(const MatrixXcd& v, const MatrixXcd& htilde, const MatrixXd& weff) {
  const MatrixXcd g = htilde * v;
  MatrixXcd u = g * g.adjoint();
  const VectorXd tx_power = v.rowwise().squaredNorm();          // Diag(V V^H)
  const VectorXd add = weff.array().square().matrix() * tx_power;
  u.diagonal() += add.cast<Complex>();
  return hermitize(u);
}

MatrixXcd compute_Lambda_gaussian(const MatrixXcd& y, const MatrixXcd& gamma,
                                  const MatrixXcd& htilde, const MatrixXd& weff) {
  const MatrixXcd k =
      y * (MatrixXcd::Identity(gamma.rows(), gamma.cols()) + gamma) * y.adjoint();
  MatrixXcd lam = htilde.adjoint() * k * htilde;
  const VectorXd rx_power = k.diagonal().real();
  const VectorXd add = weff.array().square().matrix().transpose() * rx_power;
  lam.diagonal() += add.cast<Complex>();
  return hermitize(lam);
}

MomentWorkspace::MomentWorkspace(const ChannelMoments& moments, const NetworkConfig& cfg)
    : cells_(moments.cells),
      users_(moments.n_users()),
      rx_(moments.rx_antennas),
      tx_(moments.tx_antennas) {
  if (cells_ != cfg.cells || users_ != cfg.n_users() || rx_ != cfg.rx_antennas ||
      tx_ != cfg.tx_antennas)
    throw ConfigError("moments do not match the network configuration");
  // Rearrange each D so both contractions become one GEMV:
  //   T[n*rx + m, np*tx + mp] = D[mp*rx + m, np*rx + n]
  // giving vec(U) = T vec(Q) and vec(Lambda) = T^H vec(K).
  rearranged_.resize(moments.second.size());
  for (std::size_t i = 0; i < moments.second.size(); ++i) {
    const MatrixXcd& d = moments.second[i];
    MatrixXcd t(static_cast<Eigen::Index>(rx_) * rx_, static_cast<Eigen::Index>(tx_) * tx_);
    for (int np = 0; np < tx_; ++np)
      for (int mp = 0; mp < tx_; ++mp)
        for (int n = 0; n < rx_; ++n)
          for (int m = 0; m < rx_; ++m)
            t(n * rx_ + m, np * tx_ + mp) = d(mp * rx_ + m, np * rx_ + n);
    rearranged_[i] = std::move(t);
  }
}

std::vector<MatrixXcd> MomentWorkspace::u_totals(const std::vector<MatrixXcd>& cell_grams) const {
  std::vector<MatrixXcd> totals(users_);
  std::vector<VectorXcd> q_vec(cells_);
  for (int l = 0; l < cells_; ++l) q_vec[l] = vec(cell_grams[l]);
  for (int u = 0; u < users_; ++u) {
    VectorXcd acc = VectorXcd::Zero(static_cast<Eigen::Index>(rx_) * rx_);
    for (int l = 0; l < cells_; ++l)
      acc.noalias() += rearranged_[static_cast<std::size_t>(u) * cells_ + l] * q_vec[l];
    totals[u] = hermitize(unvec(acc, rx_, rx_));
  }
  return totals;
}

std::vector<MatrixXcd> MomentWorkspace::xi_totals(
    const std::vector<MatrixXcd>& weighted_rx_kernels) const {
  std::vector<MatrixXcd> xi(cells_);
  for (int j = 0; j < cells_; ++j) {
    VectorXcd acc = VectorXcd::Zero(static_cast<Eigen::Index>(tx_) * tx_);
    for (int u = 0; u < users_; ++u) {
      acc.noalias() += rearranged_[static_cast<std::size_t>(u) * cells_ + j].adjoint() *
                       vec(weighted_rx_kernels[u]);
    }
    xi[j] = hermitize(unvec(acc, tx_, tx_));
  }
  return xi;
}

// --- Closed-form block updates -------------------------------------------

MatrixXcd update_Y(const MatrixXcd& c, const MatrixXcd& v, const MatrixXcd& u_total,
                   double sigma2) {
  const MatrixXcd a =
      sigma2 * MatrixXcd::Identity(u_total.rows(), u_total.cols()) + u_total;
  return hpd_solve(a, c * v, 1e-12 * sigma2, "Y update");
}

MatrixXcd update_Gamma(const MatrixXcd& c, const MatrixXcd& v, const MatrixXcd& u_total,
                       double sigma2) {
  const MatrixXcd cv = c * v;
  const MatrixXcd bracket = sigma2 * MatrixXcd::Identity(u_total.rows(), u_total.cols()) +
                            u_total - cv * cv.adjoint();
  // The bracket is PD whenever U_total carries the direct link's full second
  // moment; failure signals moments where D does not dominate vec(C)vec(C)^H.
  return hermitize(cv.adjoint() * hpd_solve(bracket, cv, 1e-12 * sigma2, "Gamma update"));
}

namespace {

// Power delivered by V_k(eta) = (eta I + Xi)^{-1} B_k. Returns +inf when the
// shifted matrix is numerically singular.
double cell_power_at(const MatrixXcd& xi, const MatrixXcd& targets_cat, double eta,
                     MatrixXcd* solution) {
  MatrixXcd shifted = xi;
  shifted.diagonal().array() += eta;
  Eigen::LLT<MatrixXcd> llt(shifted);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  MatrixXcd x = llt.solve(targets_cat);
  const double pw = x.squaredNorm();
  if (solution) *solution = std::move(x);
  return pw;
}

}  // namespace

std::vector<MatrixXcd> update_V_cell(const std::vector<MatrixXcd>& targets, const MatrixXcd& xi,
                                     double power_budget, double* eta_out) {
  const int mt = static_cast<int>(xi.rows());
  const int k = static_cast<int>(targets.size());
  const int mr = k > 0 ? static_cast<int>(targets[0].cols()) : 0;
  MatrixXcd cat(mt, static_cast<Eigen::Index>(k) * mr);
  bool all_zero = true;
  for (int i = 0; i < k; ++i) {
    if (!targets[i].allFinite()) throw InputError("precoder update target is not finite");
    cat.middleCols(static_cast<Eigen::Index>(i) * mr, mr) = targets[i];
    all_zero = all_zero && targets[i].isZero(0.0);
  }

  auto split = [&](const MatrixXcd& solution) {
    std::vector<MatrixXcd> v(k);
    for (int i = 0; i < k; ++i) v[i] = solution.middleCols(static_cast<Eigen::Index>(i) * mr, mr);
    return v;
  };

  if (all_zero) {
    if (eta_out) *eta_out = 0.0;
    return split(MatrixXcd::Zero(mt, static_cast<Eigen::Index>(k) * mr));
  }

  MatrixXcd sol;
  const double p0 = cell_power_at(xi, cat, 0.0, &sol);
  if (p0 <= power_budget) {
    if (eta_out) *eta_out = 0.0;
    return split(sol);
  }

  // Power is strictly decreasing in eta; find a feasible upper bracket by
  // doubling, then bisect keeping the feasible endpoint.
  double hi = 1.0;
  double p_hi = cell_power_at(xi, cat, hi, &sol);
  while (p_hi > power_budget) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("power multiplier search diverged");
    p_hi = cell_power_at(xi, cat, hi, &sol);
  }
  double lo = 0.0;
  constexpr double kResidualTol = 1e-8;
  for (int it = 0; it < 200 && std::abs(p_hi - power_budget) > kResidualTol * power_budget; ++it) {
    const double mid = 0.5 * (lo + hi);
    MatrixXcd mid_sol;
    const double pm = cell_power_at(xi, cat, mid, &mid_sol);
    if (pm <= power_budget) {
      hi = mid;
      p_hi = pm;
      sol = std::move(mid_sol);
    } else {
      lo = mid;
    }
  }
  if (eta_out) *eta_out = hi;
  return split(sol);
}

double objective_fhat(const NetworkConfig& cfg, const ChannelMoments& moments,
                      const PrecoderSet& v, const AuxState& aux,
                      const std::vector<MatrixXcd>& u_totals) {
  const int mr = cfg.rx_antennas;
  const MatrixXcd eye = MatrixXcd::Identity(mr, mr);
  double value = 0.0;
  for (int u = 0; u < cfg.n_users(); ++u) {
    const double w = cfg.weight(u);
    if (w == 0.0) continue;
    const MatrixXcd& gamma = aux.gamma[u];
    const MatrixXcd& y = aux.y[u];
    const MatrixXcd ig = eye + gamma;
    const double logdet = hpd_logdet(ig, 0.0, "log of I+Gamma");
    const MatrixXcd b = cfg.noise * eye + u_totals[u];
    const double cross = 2.0 * std::real((ig * v.V[u].adjoint() * moments.C(u).adjoint() * y).trace());
    const double quad = std::real((ig * y.adjoint() * b * y).trace());
    value += w * (logdet - std::real(gamma.trace()) + cross - quad);
  }
  return value;
}

std::vector<MatrixXcd> cell_grams(const NetworkConfig& cfg, const PrecoderSet& v) {
  std::vector<MatrixXcd> grams(cfg.cells, MatrixXcd::Zero(cfg.tx_antennas, cfg.tx_antennas));
  for (int j = 0; j < cfg.cells; ++j)
    for (int k = 0; k < cfg.users_per_cell; ++k) {
      const MatrixXcd& vk = v.V[cfg.user_index(j, k)];
      grams[j].noalias() += vk * vk.adjoint();
    }
  return grams;
}

PrecoderSet initial_precoder(const ChannelMoments& moments, const NetworkConfig& cfg) {
  PrecoderSet p = PrecoderSet::zeros(cfg);
  const double gain = std::sqrt(cfg.power / (cfg.users_per_cell * cfg.rx_antennas));
  for (int u = 0; u < cfg.n_users(); ++u) {
    Eigen::JacobiSVD<MatrixXcd> svd(moments.C(u), Eigen::ComputeThinV);
    p.V[u] = gain * svd.matrixV();
  }
  return p;
}

SolveResult run_algorithm1(const ChannelMoments& moments, const NetworkConfig& cfg,
                           const PrecoderSet& init, const StopRule& stop) {
  cfg.validate();
  moments.validate();
  init.validate(cfg);
  const MomentWorkspace workspace(moments, cfg);
  const int mr = cfg.rx_antennas;
  const MatrixXcd eye = MatrixXcd::Identity(mr, mr);

  SolveResult res;
  res.precoders = init;
  res.aux.gamma.assign(cfg.n_users(), MatrixXcd::Zero(mr, mr));
  res.aux.y.assign(cfg.n_users(), MatrixXcd::Zero(mr, mr));

  std::vector<MatrixXcd> u_totals = workspace.u_totals(cell_grams(cfg, res.precoders));
  for (int t = 0; t < stop.max_iters; ++t) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      std::vector<MatrixXcd> weighted_kernels(cfg.n_users());
      for (int u = 0; u < cfg.n_users(); ++u) {
        res.aux.y[u] = update_Y(moments.C(u), res.precoders.V[u], u_totals[u], cfg.noise);
        res.aux.gamma[u] = update_Gamma(moments.C(u), res.precoders.V[u], u_totals[u], cfg.noise);
        weighted_kernels[u] = cfg.weight(u) * res.aux.y[u] * (eye + res.aux.gamma[u]) *
                              res.aux.y[u].adjoint();
      }
      const std::vector<MatrixXcd> xi = workspace.xi_totals(weighted_kernels);
      for (int j = 0; j < cfg.cells; ++j) {
        std::vector<MatrixXcd> targets(cfg.users_per_cell);
        for (int k = 0; k < cfg.users_per_cell; ++k) {
          const int u = cfg.user_index(j, k);
          targets[k] = cfg.weight(u) * moments.C(u).adjoint() * res.aux.y[u] *
                       (eye + res.aux.gamma[u]);
        }
        const std::vector<MatrixXcd> v_cell = update_V_cell(targets, xi[j], cfg.power);
        for (int k = 0; k < cfg.users_per_cell; ++k)
          res.precoders.V[cfg.user_index(j, k)] = v_cell[k];
      }
      u_totals = workspace.u_totals(cell_grams(cfg, res.precoders));
      res.trace.objective.push_back(
          objective_fhat(cfg, moments, res.precoders, res.aux, u_totals));
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
