// SPDX-License-Identifier: Apache-2.0
//
// Hermitian linear-algebra helpers shared by the rate evaluator and the
// precoding solvers. All positive-definite systems go through Cholesky;
// explicit inverses are never formed.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace stochprec {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Complex = std::complex<double>;

// Forces exact Hermitian symmetry, averaging away rounding drift.
inline MatrixXcd hermitize(const MatrixXcd& a) { return 0.5 * (a + a.adjoint()); }

// Solves A X = B for Hermitian positive definite A. If the factorization
// fails, retries once with `jitter` added to the diagonal; a second failure
// throws NumericalError. `context` is included in the error message.
MatrixXcd hpd_solve(const MatrixXcd& a, const MatrixXcd& b, double jitter, const char* context);

// log det(A) for Hermitian positive definite A, with the same jitter retry.
double hpd_logdet(const MatrixXcd& a, double jitter, const char* context);

// Largest eigenvalue of a Hermitian PSD matrix by power iteration with a
// deterministic all-ones start. Falls back to a perturbed restart and then
// to a full eigendecomposition if the Rayleigh quotient has not settled.
double hermitian_lmax(const MatrixXcd& a, double rel_tol = 1e-10, int max_iters = 500);

// Smallest eigenvalue of a Hermitian matrix (full eigendecomposition).
double hermitian_lmin(const MatrixXcd& a);

// vec(A) by column stacking; the layout every second-moment matrix uses.
inline VectorXcd vec(const MatrixXcd& a) {
  return Eigen::Map<const VectorXcd>(a.data(), a.size());
}

inline MatrixXcd unvec(const VectorXcd& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const MatrixXcd>(v.data(), rows, cols);
}

// FNV-1a over the raw bytes of a complex matrix, for block digests.
std::uint64_t matrix_digest(const MatrixXcd& a, std::uint64_t h);

}  // namespace stochprec
