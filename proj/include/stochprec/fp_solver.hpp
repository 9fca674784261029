// SPDX-License-Identifier: Apache-2.0
//
// Moment-based matrix-FP precoding solver. The surrogate objective, its
// moment contractions, the closed-form block updates, and the main loop.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "stochprec/moments.hpp"
#include "stochprec/network.hpp"

namespace stochprec {

// Auxiliary variables of the FP surrogate, one pair per user.
struct AuxState {
  std::vector<MatrixXcd> gamma;  // Hermitian PSD, rx x rx
  std::vector<MatrixXcd> y;      // rx x rx
};

enum class StopReason { kConverged, kMaxIterations };

struct SolveTrace {
  std::vector<double> objective;     // surrogate value after each iteration
  std::vector<double> iter_seconds;  // wall time of each iteration
  // Sandwich log (fast solver only, when requested): for each iteration the
  // surrogate before the precoder update, the quadratic bound after it, and
  // the surrogate after it.
  std::vector<std::array<double, 3>> sandwich;
  StopReason stop = StopReason::kMaxIterations;

  int iterations() const { return static_cast<int>(objective.size()); }
  double final_objective() const { return objective.empty() ? 0.0 : objective.back(); }
  // True if the objective never drops by more than rel_slack * |previous|.
  bool nondecreasing(double rel_slack = 1e-8) const;
  double median_iter_seconds() const;
};

struct StopRule {
  double tol = 1e-5;    // relative objective change
  int max_iters = 200;
};

// --- Moment contractions -------------------------------------------------

// U = E[H V V^H H^H] from the link's second moment (entrywise contraction).
MatrixXcd compute_U(const MatrixXcd& v, const MatrixXcd& d, int rx_antennas);

// Same contraction applied to an arbitrary PSD tx-side kernel Q.
MatrixXcd contract_tx_kernel(const MatrixXcd& q, const MatrixXcd& d, int rx_antennas);

// Lambda = E[H^H Y (I+Gamma) Y^H H] from the link's second moment.
MatrixXcd compute_Lambda(const MatrixXcd& y, const MatrixXcd& gamma, const MatrixXcd& d,
                         int rx_antennas);

// Same contraction applied to an arbitrary PSD rx-side kernel.
MatrixXcd contract_rx_kernel(const MatrixXcd& k, const MatrixXcd& d, int rx_antennas);

// Gaussian-model closed forms (H = Htilde + Weff .* X, X ~ CN(0,1)):
//   U      = Htilde V V^H Htilde^H + diag((Weff.^2) Diag(V V^H))
//   Lambda = Htilde^H K Htilde     + diag((Weff.^2)^T Diag(K))
MatrixXcd compute_U_gaussian(const MatrixXcd& v, const MatrixXcd& htilde, const MatrixXd& weff);
MatrixXcd compute_Lambda_gaussian(const MatrixXcd& y, const MatrixXcd& gamma,
                                  const MatrixXcd& htilde, const MatrixXd& weff);

// Precomputed contraction kernels for every link of a moment set. vec(U) and
// vec(Lambda) become single mat-vec products against a rearranged D.
class MomentWorkspace {
 public:
  MomentWorkspace(const ChannelMoments& moments, const NetworkConfig& cfg);

  // Per-user totals sum_{(l,s)} U_{u,ls}, given Q_l = sum_s V_ls V_ls^H.
  std::vector<MatrixXcd> u_totals(const std::vector<MatrixXcd>& cell_grams) const;
  // Per-cell totals Xi_j = sum_{(l,s)} w_ls Lambda_{j,ls}, given the already
  // weighted kernels K_ls = w_ls Y_ls (I+Gamma_ls) Y_ls^H.
  std::vector<MatrixXcd> xi_totals(const std::vector<MatrixXcd>& weighted_rx_kernels) const;

  int rx() const { return rx_; }
  int tx() const { return tx_; }

 private:
  int cells_, users_, rx_, tx_;
  std::vector<MatrixXcd> rearranged_;  // per link: rx^2 x tx^2
};

// --- Closed-form block updates -------------------------------------------

// Y* = (sigma^2 I + U_total)^{-1} C V.
MatrixXcd update_Y(const MatrixXcd& c, const MatrixXcd& v, const MatrixXcd& u_total, double sigma2);

// Gamma* = V^H C^H (sigma^2 I + U_total - C V V^H C^H)^{-1} C V.
MatrixXcd update_Gamma(const MatrixXcd& c, const MatrixXcd& v, const MatrixXcd& u_total,
                       double sigma2);

// One cell's precoders V_k = (eta I + Xi)^{-1} B_k with the smallest eta >= 0
// meeting the power budget; eta found by bisection on the feasible side until
// the power residual is within 1e-8 relative (or eta = 0 if already feasible).
// Each trial solves the Hermitian system afresh by Cholesky.
std::vector<MatrixXcd> update_V_cell(const std::vector<MatrixXcd>& targets, const MatrixXcd& xi,
                                     double power_budget, double* eta_out = nullptr);

// Surrogate objective: per user
//   w [ logdet(I+Gamma) - tr(Gamma) + 2 Re tr((I+Gamma) V^H C^H Y)
//       - tr((I+Gamma) Y^H (sigma^2 I + U_total) Y) ].
double objective_fhat(const NetworkConfig& cfg, const ChannelMoments& moments,
                      const PrecoderSet& v, const AuxState& aux,
                      const std::vector<MatrixXcd>& u_totals);

// Per-BS gram matrices Q_l = sum_s V_ls V_ls^H.
std::vector<MatrixXcd> cell_grams(const NetworkConfig& cfg, const PrecoderSet& v);

// Feasible deterministic start: scaled dominant right singular vectors of C.
PrecoderSet initial_precoder(const ChannelMoments& moments, const NetworkConfig& cfg);

struct SolveResult {
  PrecoderSet precoders;
  AuxState aux;
  SolveTrace trace;
};

// Algorithm: iterate U -> Y -> Gamma -> Lambda -> V until the surrogate
// converges. The trace is nondecreasing and deterministic given the inputs.
SolveResult run_algorithm1(const ChannelMoments& moments, const NetworkConfig& cfg,
                           const PrecoderSet& init, const StopRule& stop = {});

}  // namespace stochprec
