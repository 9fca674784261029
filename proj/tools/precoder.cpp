// SPDX-License-Identifier: Apache-2.0
//
// precoder: stochastic precoding experiment runner.
//
//   precoder run --config cfg.json --out results/
//   precoder bound-check --config cfg.json
//   precoder bench --mt-list 32,64,128 --out results/
#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "stochprec/common.hpp"
#include "stochprec/harness.hpp"

using namespace stochprec;

namespace {

void print_rows(const ExperimentReport& report) {
  std::printf("%-12s %10s  %-12s %12s %12s %10s %7s %12s\n", "param", "value", "algorithm",
              "fhat_nats", "mc_nats", "ci99", "iters", "iter_ms");
  for (const auto& r : report.rows) {
    if (r.failed) {
      std::printf("%-12s %10.4g  %-12s FAILED: %s\n", r.sweep_param.c_str(), r.sweep_value,
                  r.algorithm.c_str(), r.error.c_str());
      continue;
    }
    std::printf("%-12s %10.4g  %-12s %12.6f %12.6f %10.6f %7d %12.4f\n", r.sweep_param.c_str(),
                r.sweep_value, r.algorithm.c_str(), r.fhat_nats, r.mc_rate_nats, r.mc_ci99_nats,
                r.iters, r.iter_time_ms);
  }
}

ExperimentConfig load_with_overrides(const std::string& path, const std::vector<std::string>& algos,
                                     std::uint64_t* seed, int* blocks, double* tol, int* max_iters,
                                     bool paper_scale) {
  ExperimentConfig cfg = ExperimentConfig::load(path);
  if (!algos.empty()) cfg.algorithms = algos;
  if (seed) cfg.seed = *seed;
  if (blocks) cfg.n_blocks = *blocks;
  if (tol) cfg.stop.tol = *tol;
  if (max_iters) cfg.stop.max_iters = *max_iters;
  if (paper_scale) cfg.paper_scale = true;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic precoding from channel moments"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run a sweep experiment from a config file");
  std::string run_config, run_out;
  std::vector<std::string> run_algos;
  std::uint64_t run_seed = 0;
  int run_blocks = 0, run_max_iters = 0;
  double run_tol = 0.0;
  bool run_paper = false;
  run->add_option("--config", run_config, "experiment config (JSON)")->required();
  run->add_option("--out", run_out, "output directory")->required();
  run->add_option("--algorithm", run_algos, "algorithms to run (fp, fast-fp, wmmse-static)");
  auto* run_seed_opt = run->add_option("--seed", run_seed, "override the config seed");
  auto* run_blocks_opt = run->add_option("--blocks", run_blocks, "override the Monte-Carlo block count");
  auto* run_tol_opt = run->add_option("--tol", run_tol, "override the solver tolerance");
  auto* run_iters_opt = run->add_option("--max-iters", run_max_iters, "override the iteration cap");
  run->add_flag("--paper-scale", run_paper, "use the full-scale dimensions");

  // bound-check
  auto* bc = app.add_subcommand("bound-check",
                                "audit the surrogate lower bound against Monte-Carlo rates");
  std::string bc_config, bc_out;
  bc->add_option("--config", bc_config, "experiment config (JSON)")->required();
  bc->add_option("--out", bc_out, "optional output directory");

  // bench
  auto* bench = app.add_subcommand("bench", "per-iteration timing of both solvers");
  std::string bench_out;
  std::vector<int> mt_list{32, 64, 128};
  int bench_users = 16, bench_rx = 2, bench_iters = 25;
  std::uint64_t bench_seed = 1;
  bench->add_option("--mt-list", mt_list, "transmit antenna counts")->delimiter(',');
  bench->add_option("--users", bench_users, "users per cell");
  bench->add_option("--rx", bench_rx, "receive antennas per user");
  bench->add_option("--iters", bench_iters, "timed iterations per solver (>= 20)");
  bench->add_option("--seed", bench_seed, "instance seed");
  bench->add_option("--out", bench_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const ExperimentConfig cfg = load_with_overrides(
          run_config, run_algos, run_seed_opt->count() ? &run_seed : nullptr,
          run_blocks_opt->count() ? &run_blocks : nullptr, run_tol_opt->count() ? &run_tol : nullptr,
          run_iters_opt->count() ? &run_max_iters : nullptr, run_paper);
      const ExperimentReport report = run_experiment(cfg);
      emit_report(report, run_out);
      print_rows(report);
      std::printf("report written to %s\n", run_out.c_str());
    } else if (bc->parsed()) {
      ExperimentConfig cfg = ExperimentConfig::load(bc_config);
      cfg.algorithms = {"fp"};
      cfg.validate();
      const ExperimentReport report = run_experiment(cfg);
      print_rows(report);
      int violations = 0;
      for (const auto& r : report.rows) {
        const bool pass = r.failed ? false : r.fhat_nats <= r.mc_rate_nats + r.mc_ci99_nats;
        if (!pass) ++violations;
        std::printf("[%s] %s=%g  fhat=%.6f  mc=%.6f +- %.6f\n", pass ? "PASS" : "FAIL",
                    r.sweep_param.c_str(), r.sweep_value, r.fhat_nats, r.mc_rate_nats,
                    r.mc_ci99_nats);
      }
      if (!bc_out.empty()) emit_report(report, bc_out);
      if (violations > 0) {
        std::fprintf(stderr, "%d bound violation(s)\n", violations);
        return 1;
      }
    } else if (bench->parsed()) {
      const ExperimentReport report =
          run_bench(mt_list, bench_users, bench_rx, bench_iters, bench_seed);
      emit_report(report, bench_out);
      print_rows(report);
      std::printf("report written to %s\n", bench_out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
