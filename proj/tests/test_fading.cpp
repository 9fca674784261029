// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stochprec/fading.hpp"
#include "test_support.hpp"

using namespace stochprec;
using testsupport::bessel_j0_series;

namespace {

GaussianFadingModel tiny_gaussian(double rho, double w) {
  GaussianFadingModel m;
  m.cells = 1;
  m.static_part = {(MatrixXcd(1, 2) << Complex(1, 0.5), Complex(-0.3, 0.2)).finished()};
  m.scale = {MatrixXd::Constant(1, 2, w)};
  m.rho = {rho};
  m.validate();
  return m;
}

}  // namespace

TEST_CASE("gaussian sampling degenerate cases") {
  SUBCASE("rho = 1 returns the static component exactly") {
    const auto m = tiny_gaussian(1.0, 0.7);
    auto rng = make_rng(5);
    const auto h = sample_gaussian(m, rng);
    CHECK(h.links[0] == m.static_part[0]);
  }
  SUBCASE("zero scale leaves only the weighted static part") {
    const auto m = tiny_gaussian(0.4, 0.0);
    auto rng = make_rng(5);
    const auto h = sample_gaussian(m, rng);
    CHECK((h.links[0] - 0.4 * m.static_part[0]).norm() == 0.0);
  }
}

TEST_CASE("gaussian entry variance matches (1 - rho^2) W^2") {
  const double rho = 0.6, w = 1.3;
  const auto m = tiny_gaussian(rho, w);
  auto rng = make_rng(17);
  const int n = 100000;
  const Complex mean_entry = rho * m.static_part[0](0, 0);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto h = sample_gaussian(m, rng);
    acc += std::norm(h.links[0](0, 0) - mean_entry);
  }
  const double expected = (1.0 - rho * rho) * w * w;
  // |H - mean|^2 is exponential with mean `expected`: std error = expected/sqrt(n).
  CHECK(std::abs(acc / n - expected) <= 3.0 * expected / std::sqrt(double(n)));
}

TEST_CASE("nakagami sampling moments") {
  NakagamiFadingModel m;
  m.cells = 1;
  m.static_part = {MatrixXcd::Zero(1, 1)};
  m.mean_power = {MatrixXd::Constant(1, 1, 1.0)};
  m.shape = 0.5;
  m.rho = {0.5};
  m.validate();

  auto rng = make_rng(23);
  const int n = 100000;
  double acc_pw = 0.0, acc_mag = 0.0;
  Complex acc_mean = 0.0;
  const double mix = std::sqrt(1.0 - 0.25);
  for (int i = 0; i < n; ++i) {
    const auto h = sample_nakagami(m, rng);
    const Complex random_part = h.links[0](0, 0) / mix;  // static part is zero
    acc_pw += std::norm(random_part);
    acc_mag += std::abs(random_part);
    acc_mean += random_part;
  }
  SUBCASE("E|M|^2 = Omega") {
    // Var(|M|^2) = 2 Omega^2 at m = 0.5.
    CHECK(std::abs(acc_pw / n - 1.0) <= 3.0 * std::sqrt(2.0 / n));
  }
  SUBCASE("E[M] = 0 by circular symmetry") {
    CHECK(std::abs(acc_mean / double(n)) <= 3.0 / std::sqrt(double(n)));
  }
  SUBCASE("E|M| at m=0.5, Omega=1 is sqrt(2/pi)") {
    const double expected = std::sqrt(2.0 / std::numbers::pi);  // 0.7979
    CHECK(expected == doctest::Approx(0.7979).epsilon(1e-4));
    CHECK(std::abs(acc_mag / n - expected) <= 3.0 / std::sqrt(double(n)));
  }
}

TEST_CASE("jakes_rho") {
  SUBCASE("zero Doppler gives rho = 1") { CHECK(jakes_rho(0.0, 0.01) == 1.0); }
  SUBCASE("first Bessel zero clips to the floor") {
    const double x = 2.404826;  // J0 here is ~ -2.3e-7, below the clip floor
    CHECK(jakes_rho(x / (2.0 * std::numbers::pi), 1.0) == 1e-6);
  }
  SUBCASE("J0(1) against the series oracle") {
    const double rho = jakes_rho(1.0 / (2.0 * std::numbers::pi), 1.0);
    CHECK(rho == doctest::Approx(bessel_j0_series(1.0)).epsilon(1e-12));
    CHECK(rho == doctest::Approx(0.76520).epsilon(1e-5));
  }
  SUBCASE("series oracle sanity across small arguments") {
    for (double x : {0.1, 0.5, 1.7, 3.9, 6.2, 7.9}) {
      const double rho = jakes_rho(x / (2.0 * std::numbers::pi), 1.0);
      const double expected = std::clamp(bessel_j0_series(x), 1e-6, 1.0);
      CHECK(rho == doctest::Approx(expected).epsilon(1e-11));
    }
  }
}

TEST_CASE("model builders produce valid models with fixed static parts") {
  NetworkConfig net;
  net.cells = 1;
  net.users_per_cell = 3;
  net.tx_antennas = 4;
  net.rx_antennas = 2;
  net.power = 1.0;
  net.noise = 1e-12;
  const Topology topo = generate_topology(net, 300.0, 9, false);

  const auto g1 = make_gaussian_model(net, topo, 0.7, 11);
  const auto g2 = make_gaussian_model(net, topo, 0.7, 11);
  CHECK(g1.static_part[0] == g2.static_part[0]);
  const auto g3 = make_gaussian_model(net, topo, 0.7, 12);
  CHECK(g1.static_part[0] != g3.static_part[0]);

  const auto nk = make_nakagami_model(net, topo, 0.7, 0.5, 11);
  for (int u = 0; u < net.n_users(); ++u)
    for (int l = 0; l < net.cells; ++l) {
      const double w = topo.scale(net, u, l);
      CHECK(nk.mean_power[net.link_index(u, l)](0, 0) == doctest::Approx(w * w));
    }
}
