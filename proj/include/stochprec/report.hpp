// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration, result reports, and JSON/CSV persistence.
#pragma once

#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "stochprec/fp_solver.hpp"
#include "stochprec/moments.hpp"
#include "stochprec/network.hpp"

namespace stochprec {

using Json = nlohmann::json;

enum class Scenario { kSingleCell, kMultiCell };
enum class FadingFamily { kGaussian, kNakagami };
enum class SweepAxis { kNoiseDbm, kRho, kTxAntennas };

std::string to_string(SweepAxis axis);

struct ExperimentConfig {
  Scenario scenario = Scenario::kSingleCell;
  FadingFamily family = FadingFamily::kGaussian;
  bool paper_scale = false;
  // 0 means "use the scenario default" (resolved by resolve_network()).
  int tx_antennas = 0;
  int rx_antennas = 0;
  int users_per_cell = 0;
  double power_dbm = 30.0;
  double noise_dbm = -90.0;
  double cell_radius_m = 300.0;
  double rho = 0.6;
  double nakagami_shape = 0.5;
  SweepAxis axis = SweepAxis::kNoiseDbm;
  std::vector<double> sweep = {-90.0};
  std::vector<std::string> algorithms = {"fp", "fast-fp", "wmmse-static"};
  int n_blocks = 1000;
  std::uint64_t seed = 1;
  StopRule stop;
  bool measure_time = false;

  void validate() const;
  // Network dimensions and powers, after applying scenario/scale defaults.
  NetworkConfig resolve_network() const;
  int cells() const { return scenario == Scenario::kSingleCell ? 1 : 7; }

  Json to_json() const;
  static ExperimentConfig from_json(const Json& j);  // rejects unknown keys
  static ExperimentConfig load(const std::string& path);
};

struct ReportRow {
  std::string sweep_param;
  double sweep_value = 0.0;
  std::string algorithm;
  double fhat_nats = 0.0;
  double mc_rate_nats = 0.0;
  double mc_ci99_nats = 0.0;
  int iters = 0;
  double iter_time_ms = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::uint64_t block_digest = 0;

  bool operator==(const ReportRow&) const = default;
};

inline constexpr const char* kCsvHeader =
    "sweep_param,sweep_value,algorithm,fhat_nats,mc_rate_nats,mc_ci99_nats,iters,iter_time_ms,seed";

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::string config_digest;
  std::string version;
  std::string config_text;  // canonical JSON of the config that produced it

  bool operator==(const ExperimentReport&) const = default;

  std::string to_csv() const;
  Json to_json() const;
  static ExperimentReport from_json(const Json& j);
};

// Writes report.csv and report.json under out_dir (created if needed).
void emit_report(const ExperimentReport& report, const std::string& out_dir);

// Matrix/domain-type JSON codecs (complex entries as [re, im] pairs).
Json matrix_to_json(const MatrixXcd& m);
MatrixXcd matrix_from_json(const Json& j);
Json precoders_to_json(const PrecoderSet& p);
PrecoderSet precoders_from_json(const Json& j);
Json topology_to_json(const Topology& t);
Topology topology_from_json(const Json& j);
Json moments_to_json(const ChannelMoments& m);
ChannelMoments moments_from_json(const Json& j);

}  // namespace stochprec
