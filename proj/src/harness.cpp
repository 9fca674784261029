// SPDX-License-Identifier: Apache-2.0
#include "stochprec/harness.hpp"

#include <cinttypes>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "stochprec/common.hpp"

namespace stochprec {

SolveResult wmmse_static(const std::vector<MatrixXcd>& static_channels, const NetworkConfig& cfg,
                         const StopRule& stop) {
  const ChannelMoments moments = deterministic_moments(static_channels, cfg.cells);
  return run_algorithm1(moments, cfg, initial_precoder(moments, cfg), stop);
}

double fhat_at(const ChannelMoments& moments, const NetworkConfig& cfg, const PrecoderSet& v) {
  const MomentWorkspace workspace(moments, cfg);
  const std::vector<MatrixXcd> u_totals = workspace.u_totals(cell_grams(cfg, v));
  AuxState aux;
  aux.y.resize(cfg.n_users());
  aux.gamma.resize(cfg.n_users());
  for (int u = 0; u < cfg.n_users(); ++u) {
    aux.y[u] = update_Y(moments.C(u), v.V[u], u_totals[u], cfg.noise);
    aux.gamma[u] = update_Gamma(moments.C(u), v.V[u], u_totals[u], cfg.noise);
  }
  return objective_fhat(cfg, moments, v, aux, u_totals);
}

namespace {

FadingModel build_model(const ExperimentConfig& cfg, const NetworkConfig& net,
                        const Topology& topo, double rho) {
  if (cfg.family == FadingFamily::kGaussian)
    return make_gaussian_model(net, topo, rho, cfg.seed);
  return make_nakagami_model(net, topo, rho, cfg.nakagami_shape, cfg.seed);
}

void set_rho(FadingModel& model, double rho) {
  std::visit([rho](auto& m) { m.rho.assign(m.rho.size(), rho); }, model);
}

struct SolveOutcome {
  PrecoderSet precoders;
  double fhat = 0.0;
  int iters = 0;
  double iter_ms = 0.0;
};

SolveOutcome run_one(const std::string& algorithm, const ChannelMoments& moments,
                     const NetworkConfig& net, const FadingModel& model, const StopRule& stop,
                     bool measure_time) {
  SolveOutcome out;
  const PrecoderSet init = initial_precoder(moments, net);
  SolveTrace trace;
  if (algorithm == "fp") {
    auto res = run_algorithm1(moments, net, init, stop);
    out.precoders = std::move(res.precoders);
    trace = std::move(res.trace);
  } else if (algorithm == "fast-fp") {
    auto res = run_algorithm2(moments, net, init, stop);
    out.precoders = std::move(res.precoders);
    trace = std::move(res.trace);
  } else if (algorithm == "wmmse-static") {
    auto res = wmmse_static(static_components(model), net, stop);
    out.precoders = std::move(res.precoders);
    trace = std::move(res.trace);
  } else {
    throw ConfigError("unknown algorithm '" + algorithm + "'");
  }
  out.iters = trace.iterations();
  if (measure_time) out.iter_ms = trace.median_iter_seconds() * 1e3;
  // Reported bound: refreshed surrogate under the evaluation moments, which
  // is a valid lower bound on the expected rate for any feasible precoder.
  out.fhat = fhat_at(moments, net, out.precoders);
  return out;
}

std::string digest_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.version = kVersion;
  report.config_text = cfg.to_json().dump();
  report.config_digest = digest_hex(fnv1a(report.config_text));

  NetworkConfig net = cfg.resolve_network();
  const Topology topo = generate_topology(net, cfg.cell_radius_m, cfg.seed, net.cells > 1);
  FadingModel model = build_model(cfg, net, topo, cfg.rho);

  const std::string param = to_string(cfg.axis);
  for (std::size_t p = 0; p < cfg.sweep.size(); ++p) {
    const double value = cfg.sweep[p];
    switch (cfg.axis) {
      case SweepAxis::kNoiseDbm:
        net.noise = dbm_to_watts(value);
        break;
      case SweepAxis::kRho:
        set_rho(model, value);
        break;
      case SweepAxis::kTxAntennas:
        net.tx_antennas = static_cast<int>(value);
        model = build_model(cfg, net, topo, cfg.rho);
        break;
    }
    const ChannelMoments moments = analytic_moments(model);

    std::vector<SolveOutcome> outcomes(cfg.algorithms.size());
    std::vector<bool> ok(cfg.algorithms.size(), true);
    std::vector<std::string> errors(cfg.algorithms.size());
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
      try {
        outcomes[a] = run_one(cfg.algorithms[a], moments, net, model, cfg.stop, cfg.measure_time);
      } catch (const std::exception& e) {
        ok[a] = false;
        errors[a] = e.what();
      }
    }

    // Common random numbers: one block set per sweep point scores everyone.
    std::vector<const PrecoderSet*> to_score;
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a)
      if (ok[a]) to_score.push_back(&outcomes[a].precoders);
    std::vector<McRateEstimate> estimates;
    if (!to_score.empty())
      estimates = monte_carlo_weighted_sum_rate_multi(model, net, to_score, cfg.n_blocks,
                                                      splitmix64(cfg.seed ^ (0xb10c + p)));

    std::size_t e = 0;
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
      ReportRow row;
      row.sweep_param = param;
      row.sweep_value = value;
      row.algorithm = cfg.algorithms[a];
      row.seed = cfg.seed;
      if (ok[a]) {
        const McRateEstimate& mc = estimates[e++];
        row.fhat_nats = outcomes[a].fhat;
        row.mc_rate_nats = mc.mean;
        row.mc_ci99_nats = mc.half_width_99;
        row.iters = outcomes[a].iters;
        row.iter_time_ms = outcomes[a].iter_ms;
        row.block_digest = mc.block_digest;
      } else {
        row.failed = true;
        row.error = errors[a];
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

ExperimentReport run_bench(const std::vector<int>& tx_antenna_list, int users_per_cell,
                           int rx_antennas, int iters, std::uint64_t seed) {
  if (iters < 20) throw ConfigError("bench needs at least 20 timed iterations");
  ExperimentReport report;
  report.version = kVersion;
  report.config_text = "";
  report.config_digest = digest_hex(fnv1a(std::string("bench")));

  for (int mt : tx_antenna_list) {
    NetworkConfig net;
    net.cells = 1;
    net.users_per_cell = users_per_cell;
    net.tx_antennas = mt;
    net.rx_antennas = rx_antennas;
    net.power = dbm_to_watts(30.0);
    net.noise = dbm_to_watts(-90.0);
    net.validate();
    const Topology topo = generate_topology(net, 300.0, seed, false);
    const GaussianFadingModel model = make_gaussian_model(net, topo, 0.6, seed);
    const ChannelMoments moments = analytic_moments(model);
    const PrecoderSet init = initial_precoder(moments, net);

    const StopRule warm{0.0, 3};
    const StopRule timed{0.0, iters};  // tol 0: run exactly `iters` iterations
    for (const char* algorithm : {"fp", "fast-fp"}) {
      SolveTrace trace;
      PrecoderSet out;
      if (std::string(algorithm) == "fp") {
        (void)run_algorithm1(moments, net, init, warm);
        auto res = run_algorithm1(moments, net, init, timed);
        trace = std::move(res.trace);
        out = std::move(res.precoders);
      } else {
        (void)run_algorithm2(moments, net, init, warm);
        auto res = run_algorithm2(moments, net, init, timed);
        trace = std::move(res.trace);
        out = std::move(res.precoders);
      }
      ReportRow row;
      row.sweep_param = "tx_antennas";
      row.sweep_value = mt;
      row.algorithm = algorithm;
      row.fhat_nats = fhat_at(moments, net, out);
      const McRateEstimate mc =
          monte_carlo_weighted_sum_rate(FadingModel(model), net, out, 200, splitmix64(seed));
      row.mc_rate_nats = mc.mean;
      row.mc_ci99_nats = mc.half_width_99;
      row.block_digest = mc.block_digest;
      row.iters = trace.iterations();
      row.iter_time_ms = trace.median_iter_seconds() * 1e3;
      row.seed = seed;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace stochprec
