// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stochprec/fast_solver.hpp"
#include "test_support.hpp"

using namespace stochprec;
using testsupport::random_complex;
using testsupport::random_feasible_precoder;
using testsupport::random_hermitian_psd;
using testsupport::random_instance;

namespace {

MatrixXcd scalar(double x) { return MatrixXcd::Constant(1, 1, Complex(x, 0)); }

// Sets up (Y*, Gamma*, Z=V, Xi, alpha) at a given precoder, as one solver
// iteration would before the V update.
struct Midpoint {
  AuxState aux;
  FastAuxState fast;
  std::vector<MatrixXcd> u_totals;
};

Midpoint midpoint_at(const testsupport::Instance& inst, const PrecoderSet& v) {
  const MomentWorkspace ws(inst.moments, inst.net);
  Midpoint mid;
  mid.u_totals = ws.u_totals(cell_grams(inst.net, v));
  const int n = inst.net.n_users();
  const MatrixXcd eye = MatrixXcd::Identity(inst.net.rx_antennas, inst.net.rx_antennas);
  mid.aux.y.resize(n);
  mid.aux.gamma.resize(n);
  mid.fast.z.resize(n);
  std::vector<MatrixXcd> kernels(n);
  for (int u = 0; u < n; ++u) {
    mid.aux.y[u] = update_Y(inst.moments.C(u), v.V[u], mid.u_totals[u], inst.net.noise);
    mid.aux.gamma[u] = update_Gamma(inst.moments.C(u), v.V[u], mid.u_totals[u], inst.net.noise);
    mid.fast.z[u] = update_Z(v.V[u]);
    kernels[u] = inst.net.weight(u) * mid.aux.y[u] * (eye + mid.aux.gamma[u]) *
                 mid.aux.y[u].adjoint();
  }
  mid.fast.xi = ws.xi_totals(kernels);
  mid.fast.alpha = alpha_from_xi(mid.fast.xi);
  return mid;
}

}  // namespace

TEST_CASE("alpha selection") {
  SUBCASE("diagonal Xi") {
    MatrixXcd xi = MatrixXcd::Zero(2, 2);
    xi.diagonal() << 2.0, 1.0;
    const auto alpha = alpha_from_xi({xi});
    CHECK(alpha[0] == doctest::Approx(2.0 * (1.0 + 1e-9)).epsilon(1e-12));
  }
  SUBCASE("2x2 closed form") {
    MatrixXcd xi(2, 2);
    xi << Complex(2, 0), Complex(1, 0), Complex(1, 0), Complex(2, 0);
    // Characteristic roots of [[2,1],[1,2]] are 3 and 1.
    const auto alpha = alpha_from_xi({xi});
    CHECK(alpha[0] == doctest::Approx(3.0).epsilon(1e-8));
  }
  SUBCASE("zero Xi gives zero alpha") {
    CHECK(alpha_from_xi({MatrixXcd::Zero(3, 3)})[0] == 0.0);
  }
  SUBCASE("Xi - alpha I is negative semidefinite on random kernels") {
    auto rng = make_rng(91);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 6);
      const MatrixXcd xi = random_hermitian_psd(rng, n);
      const double alpha = alpha_from_xi({xi})[0];
      const MatrixXcd gap = xi - alpha * MatrixXcd::Identity(n, n);
      CHECK(hermitian_lmin(-gap) >= -1e-9 * alpha);
    }
  }
}

TEST_CASE("nonhomogeneous bound inequality") {
  auto rng = make_rng(92);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 4);
    const int n = 1 + static_cast<int>(rng() % 3);
    const MatrixXcd k = random_hermitian_psd(rng, m) + random_hermitian_psd(rng, m);
    const MatrixXcd l = k - random_hermitian_psd(rng, m);  // L <= K by construction
    const MatrixXcd x = random_complex(rng, m, n);
    const MatrixXcd z = random_complex(rng, m, n);
    const double lhs = std::real((x.adjoint() * l * x).trace());
    const double rhs = std::real((x.adjoint() * k * x).trace()) +
                       2.0 * std::real((x.adjoint() * (l - k) * z).trace()) +
                       std::real((z.adjoint() * (k - l) * z).trace());
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    CHECK(lhs <= rhs + 1e-10 * scale);
    // Equality at Z = X.
    const double rhs_eq = std::real((x.adjoint() * k * x).trace()) +
                          2.0 * std::real((x.adjoint() * (l - k) * x).trace()) +
                          std::real((x.adjoint() * (k - l) * x).trace());
    CHECK(std::abs(lhs - rhs_eq) <= 1e-10 * scale);
  }
}

TEST_CASE("update_V_cell_fast") {
  SUBCASE("scalar example") {
    // C=1, Y=0.4, Gamma=4, Z=2, Xi=0.8, alpha=0.8, w=1, P=4:
    // Psi = 2 + (2 - 1.6)/0.8 = 2.5, power 6.25 > 4, beta = 0.8, V = 2.
    const auto v = update_V_cell_fast({scalar(2.0)}, {scalar(2.0)}, scalar(0.8), 0.8, 4.0);
    CHECK(v[0](0, 0).real() == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("zero state stays zero") {
    const auto v = update_V_cell_fast({MatrixXcd::Zero(3, 2)}, {MatrixXcd::Zero(3, 2)},
                                      MatrixXcd::Zero(3, 3), 0.0, 4.0);
    CHECK(v[0].norm() == 0.0);
  }
  SUBCASE("scaled branch lands exactly on the power boundary") {
    auto rng = make_rng(93);
    const MatrixXcd target = 5.0 * random_complex(rng, 4, 2);
    const MatrixXcd z = random_complex(rng, 4, 2);
    const MatrixXcd xi = random_hermitian_psd(rng, 4);
    const double alpha = alpha_from_xi({xi})[0];
    const auto v = update_V_cell_fast({target}, {z}, xi, alpha, 2.0);
    CHECK(v[0].squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("alpha = 0 with a nonzero target uses full power along the target") {
    auto rng = make_rng(94);
    const MatrixXcd target = random_complex(rng, 3, 2);
    const auto v = update_V_cell_fast({target}, {MatrixXcd::Zero(3, 2)}, MatrixXcd::Zero(3, 3),
                                      0.0, 4.0);
    CHECK(v[0].squaredNorm() == doctest::Approx(4.0).epsilon(1e-12));
    // Direction preserved.
    const Complex ratio = v[0](0, 0) / target(0, 0);
    CHECK((v[0] - ratio * target).norm() <= 1e-12 * v[0].norm());
  }
}

TEST_CASE("zeta equals fhat at Z = V and bounds it elsewhere") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto inst = random_instance(seed, seed % 2 == 0);
    auto rng = make_rng(seed + 100);
    const PrecoderSet v = random_feasible_precoder(rng, inst.net);
    Midpoint mid = midpoint_at(inst, v);
    const double fhat = objective_fhat(inst.net, inst.moments, v, mid.aux, mid.u_totals);
    const double zeta = objective_zeta(inst.net, inst.moments, v, mid.aux, mid.fast);
    CHECK(zeta == doctest::Approx(fhat).epsilon(1e-9));

    // Anchor away from V: the bound drops below the surrogate.
    for (int trial = 0; trial < 5; ++trial) {
      FastAuxState perturbed = mid.fast;
      for (auto& z : perturbed.z)
        z += 0.3 * random_complex(rng, z.rows(), z.cols());
      const double zeta_p = objective_zeta(inst.net, inst.moments, v, mid.aux, perturbed);
      CHECK(zeta_p <= fhat + 1e-9 * std::max(1.0, std::abs(fhat)));
    }
  }
}

TEST_CASE("zeta of the all-zero state is zero") {
  NetworkConfig net;
  net.cells = 1;
  net.users_per_cell = 1;
  net.tx_antennas = 2;
  net.rx_antennas = 1;
  net.power = 1.0;
  net.noise = 1.0;
  const ChannelMoments mom = deterministic_moments({MatrixXcd::Zero(1, 2)}, 1);
  PrecoderSet v = PrecoderSet::zeros(net);
  AuxState aux;
  aux.gamma = {MatrixXcd::Zero(1, 1)};
  aux.y = {MatrixXcd::Zero(1, 1)};
  FastAuxState fast;
  fast.z = {MatrixXcd::Zero(2, 1)};
  fast.xi = {MatrixXcd::Zero(2, 2)};
  fast.alpha = {0.0};
  CHECK(objective_zeta(net, mom, v, aux, fast) == 0.0);
}

TEST_CASE("algorithm 2: sandwich chain per iteration") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto inst = random_instance(seed, seed % 2 == 1);
    const auto res = run_algorithm2(inst.moments, inst.net,
                                    initial_precoder(inst.moments, inst.net), {1e-6, 30}, true);
    REQUIRE(res.trace.sandwich.size() == res.trace.objective.size());
    for (std::size_t t = 0; t < res.trace.sandwich.size(); ++t) {
      const auto& [fhat_mid, zeta_new, fhat_new] = res.trace.sandwich[t];
      const double slack = 1e-8 * std::max(1.0, std::abs(fhat_mid));
      CHECK(zeta_new >= fhat_mid - slack);   // V update improves the bound
      CHECK(fhat_new >= zeta_new - slack);   // bound below the surrogate
      if (t > 0)
        CHECK(fhat_mid >= res.trace.objective[t - 1] - slack);  // Y/Gamma steps ascend
    }
    CHECK(res.trace.nondecreasing(1e-8));
  }
}

TEST_CASE("algorithm 2 matches algorithm 1 on small instances") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto rng = make_rng(seed + 110);
    NetworkConfig net;
    net.cells = 1;
    net.users_per_cell = 4;
    net.tx_antennas = 8;
    net.rx_antennas = 2;
    net.power = 4.0;
    net.noise = 0.2;
    const auto model = testsupport::random_gaussian_model(rng, net);
    const ChannelMoments mom = analytic_moments(FadingModel(model));
    const PrecoderSet init = initial_precoder(mom, net);
    const auto a1 = run_algorithm1(mom, net, init, {1e-8, 1000});
    const auto a2 = run_algorithm2(mom, net, init, {1e-8, 4000});
    CHECK(a2.trace.final_objective() ==
          doctest::Approx(a1.trace.final_objective()).epsilon(0.01));
  }
}

TEST_CASE("algorithm 2 output is power feasible and deterministic") {
  const auto inst = random_instance(9, false);
  const PrecoderSet init = initial_precoder(inst.moments, inst.net);
  const auto a = run_algorithm2(inst.moments, inst.net, init, {1e-6, 50});
  const auto b = run_algorithm2(inst.moments, inst.net, init, {1e-6, 50});
  CHECK_NOTHROW(a.precoders.validate(inst.net));
  REQUIRE(a.trace.objective.size() == b.trace.objective.size());
  for (std::size_t i = 0; i < a.trace.objective.size(); ++i)
    CHECK(a.trace.objective[i] == b.trace.objective[i]);
}
