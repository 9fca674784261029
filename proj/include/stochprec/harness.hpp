// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration: baseline solver, sweep execution with common
// random numbers, and the per-iteration timing benchmark.
#pragma once

#include "stochprec/fast_solver.hpp"
#include "stochprec/rate.hpp"
#include "stochprec/report.hpp"

namespace stochprec {

// Precoding on deterministic channels: runs the FP solver on rank-1
// zero-variance moments, where the iteration coincides with the WMMSE-class
// fixed point. `static_channels` holds one matrix per link, user-major.
SolveResult wmmse_static(const std::vector<MatrixXcd>& static_channels, const NetworkConfig& cfg,
                         const StopRule& stop = {});

// Tightest surrogate value at a fixed precoder: one closed-form refresh of
// (Y, Gamma) under the given moments. By the lower-bound property this never
// exceeds the true expected weighted sum rate, whatever produced V.
double fhat_at(const ChannelMoments& moments, const NetworkConfig& cfg, const PrecoderSet& v);

// Runs every (sweep point, algorithm) pair. All algorithms at one sweep
// point are scored on identical Monte-Carlo blocks. Solver failures mark the
// row as failed and the sweep continues.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Median per-iteration wall time of both solvers across transmit-antenna
// counts, after one warmup solve. Emits standard report rows.
ExperimentReport run_bench(const std::vector<int>& tx_antenna_list, int users_per_cell,
                           int rx_antennas, int iters, std::uint64_t seed);

}  // namespace stochprec
