// SPDX-License-Identifier: Apache-2.0
#include "stochprec/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "stochprec/common.hpp"

namespace stochprec {

namespace {

[[noreturn]] void throw_factorization_failure(const MatrixXcd& a, double jitter, const char* context) {
  std::ostringstream os;
  os << "hermitian factorization failed (" << context << "): n=" << a.rows()
     << " trace=" << a.trace().real() << " jitter=" << jitter;
  throw NumericalError(os.str());
}

}  // namespace

MatrixXcd hpd_solve(const MatrixXcd& a, const MatrixXcd& b, double jitter, const char* context) {
  Eigen::LLT<MatrixXcd> llt(a);
  if (llt.info() == Eigen::Success) return llt.solve(b);
  const MatrixXcd aj = a + jitter * MatrixXcd::Identity(a.rows(), a.cols());
  llt.compute(aj);
  if (llt.info() == Eigen::Success) return llt.solve(b);
  throw_factorization_failure(a, jitter, context);
}

double hpd_logdet(const MatrixXcd& a, double jitter, const char* context) {
  Eigen::LLT<MatrixXcd> llt(a);
  if (llt.info() != Eigen::Success) {
    const MatrixXcd aj = a + jitter * MatrixXcd::Identity(a.rows(), a.cols());
    llt.compute(aj);
    if (llt.info() != Eigen::Success) throw_factorization_failure(a, jitter, context);
  }
  // det(A) = prod of squared Cholesky diagonal entries.
  double logdet = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += 2.0 * std::log(l(i, i).real());
  return logdet;
}

namespace {

// One power-iteration sweep from the given start vector. Returns the final
// Rayleigh quotient and whether the iterate settled to rel_tol.
std::pair<double, bool> power_sweep(const MatrixXcd& a, VectorXcd v, double rel_tol, int max_iters) {
  double lambda = 0.0;
  const double nv = v.norm();
  if (nv == 0.0) return {0.0, true};
  v /= nv;
  for (int it = 0; it < max_iters; ++it) {
    VectorXcd w = a * v;
    const double nw = w.norm();
    if (nw == 0.0) return {0.0, true};  // v in the null space: matrix is zero on this ray
    w /= nw;
    const double next = std::real(w.dot(a * w));
    const bool settled = std::abs(next - lambda) <= rel_tol * std::max(1.0, std::abs(next));
    lambda = next;
    v.swap(w);
    if (settled && it > 0) return {lambda, true};
  }
  return {lambda, false};
}

}  // namespace

double hermitian_lmax(const MatrixXcd& a, double rel_tol, int max_iters) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  if (a.isZero(0.0)) return 0.0;
  auto [lambda, ok] = power_sweep(a, VectorXcd::Ones(n), rel_tol, max_iters);
  if (!ok) {
    // Perturbed restart; handles starts that are (nearly) orthogonal to the
    // dominant eigenvector or stagnation on clustered eigenvalues.
    VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(1.0 + 0.25 * (i % 3), (i % 2) ? -0.5 : 0.5);
    std::tie(lambda, ok) = power_sweep(a, v, rel_tol, max_iters);
  }
  if (!ok) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  }
  return lambda;
}

double hermitian_lmin(const MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::uint64_t matrix_digest(const MatrixXcd& a, std::uint64_t h) {
  return fnv1a(a.data(), sizeof(Complex) * static_cast<std::size_t>(a.size()), h);
}

}  // namespace stochprec
