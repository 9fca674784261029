// SPDX-License-Identifier: Apache-2.0
//
// Inverse-free large-scale variant of the FP precoding solver. A
// nonhomogeneous quadratic bound replaces the per-cell matrix inverse with a
// scaled-identity step plus a power rescaling.
#pragma once

#include "stochprec/fp_solver.hpp"

namespace stochprec {

// State specific to the fast solver: the bound anchor Z (one per user), and
// per cell the weighted interference kernel Xi with its largest eigenvalue.
struct FastAuxState {
  std::vector<MatrixXcd> z;     // tx x rx, per user
  std::vector<MatrixXcd> xi;    // tx x tx Hermitian PSD, per cell
  std::vector<double> alpha;    // >= lmax(Xi), per cell
};

// Xi_j = sum_{(l,s)} w_ls Lambda_{j,ls} and alpha_j = lmax(Xi_j) inflated by
// (1 + 1e-9) so Xi <= alpha I holds under floating point.
std::pair<std::vector<MatrixXcd>, std::vector<double>> compute_Xi_alpha(
    const NetworkConfig& cfg, const std::vector<std::vector<MatrixXcd>>& lambdas);

// Same, from already-summed Xi matrices.
std::vector<double> alpha_from_xi(const std::vector<MatrixXcd>& xi);

// The bound anchor is the current precoder.
inline MatrixXcd update_Z(const MatrixXcd& v) { return v; }

// One cell's fast precoder update:
//   Psi_k = Z_k + (1/alpha)(B_k - Xi Z_k),
//   V = Psi if within budget, else scaled onto the power boundary.
// No linear system of the transmit dimension is solved here. alpha == 0 with
// a nonzero target falls back to the full-power step along the target.
std::vector<MatrixXcd> update_V_cell_fast(const std::vector<MatrixXcd>& targets,
                                          const std::vector<MatrixXcd>& z, const MatrixXcd& xi,
                                          double alpha, double power_budget);

// Quadratic-bound surrogate; equals objective_fhat when z == v and never
// exceeds it otherwise.
double objective_zeta(const NetworkConfig& cfg, const ChannelMoments& moments,
                      const PrecoderSet& v, const AuxState& aux, const FastAuxState& fast);

struct FastSolveResult {
  PrecoderSet precoders;
  AuxState aux;
  FastAuxState fast;
  SolveTrace trace;
};

// Algorithm: iterate U -> Y -> Gamma -> Z -> Lambda -> (Xi, alpha) -> V with
// the same stopping rule as the base solver. When log_sandwich is set, the
// trace records (surrogate before V update, bound after, surrogate after)
// per iteration.
FastSolveResult run_algorithm2(const ChannelMoments& moments, const NetworkConfig& cfg,
                               const PrecoderSet& init, const StopRule& stop = {},
                               bool log_sandwich = false);

}  // namespace stochprec
