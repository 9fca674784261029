// SPDX-License-Identifier: Apache-2.0
#include "stochprec/report.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "stochprec/common.hpp"

namespace stochprec {

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void require_keys(const Json& j, const std::set<std::string>& allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError(std::string("unknown key '") + it.key() + "' in " + where);
  }
}

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNoiseDbm: return "noise_dbm";
    case SweepAxis::kRho: return "rho";
    case SweepAxis::kTxAntennas: return "tx_antennas";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (sweep.empty()) throw ConfigError("sweep value list must not be empty");
  if (algorithms.empty()) throw ConfigError("algorithm list must not be empty");
  for (const auto& a : algorithms)
    if (a != "fp" && a != "fast-fp" && a != "wmmse-static")
      throw ConfigError("unknown algorithm '" + a + "'");
  if (n_blocks < 2) throw ConfigError("n_blocks must be >= 2");
  if (!(rho > 0.0) || rho > 1.0) throw ConfigError("rho must lie in (0, 1]");
  if (!(nakagami_shape >= 0.5)) throw ConfigError("nakagami_shape must be >= 0.5");
  if (!(cell_radius_m > 0.0)) throw ConfigError("cell_radius_m must be positive");
  if (!(stop.tol >= 0.0) || stop.max_iters < 1) throw ConfigError("bad stopping rule");
  if (axis == SweepAxis::kRho)
    for (double r : sweep)
      if (!(r > 0.0) || r > 1.0) throw ConfigError("swept rho values must lie in (0, 1]");
  if (axis == SweepAxis::kTxAntennas)
    for (double m : sweep)
      if (m < 1.0 || m != std::floor(m)) throw ConfigError("swept antenna counts must be positive integers");
  for (double dbm : {power_dbm, noise_dbm}) {
    const double rt = watts_to_dbm(dbm_to_watts(dbm));
    if (std::abs(rt - dbm) > 1e-12 * std::max(1.0, std::abs(dbm)))
      throw ConfigError("dBm <-> watt conversion does not round-trip");
  }
  resolve_network().validate();
}

NetworkConfig ExperimentConfig::resolve_network() const {
  NetworkConfig net;
  net.cells = cells();
  if (scenario == Scenario::kSingleCell) {
    net.tx_antennas = paper_scale ? 64 : 16;
    net.users_per_cell = paper_scale ? 32 : 8;
  } else {
    net.tx_antennas = paper_scale ? 32 : 8;
    net.users_per_cell = paper_scale ? 16 : 4;
  }
  net.rx_antennas = 2;
  if (tx_antennas > 0) net.tx_antennas = tx_antennas;
  if (rx_antennas > 0) net.rx_antennas = rx_antennas;
  if (users_per_cell > 0) net.users_per_cell = users_per_cell;
  net.power = dbm_to_watts(power_dbm);
  net.noise = dbm_to_watts(noise_dbm);
  return net;
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["scenario"] = scenario == Scenario::kSingleCell ? "single-cell" : "multi-cell";
  j["fading"] = family == FadingFamily::kGaussian ? "gaussian" : "nakagami";
  j["paper_scale"] = paper_scale;
  if (tx_antennas > 0) j["tx_antennas"] = tx_antennas;
  if (rx_antennas > 0) j["rx_antennas"] = rx_antennas;
  if (users_per_cell > 0) j["users_per_cell"] = users_per_cell;
  j["power_dbm"] = power_dbm;
  j["noise_dbm"] = noise_dbm;
  j["cell_radius_m"] = cell_radius_m;
  j["rho"] = rho;
  j["nakagami_shape"] = nakagami_shape;
  j["sweep"] = Json{{"axis", to_string(axis)}, {"values", sweep}};
  j["algorithms"] = algorithms;
  j["n_blocks"] = n_blocks;
  j["seed"] = seed;
  j["tol"] = stop.tol;
  j["max_iters"] = stop.max_iters;
  j["measure_time"] = measure_time;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  require_keys(j, {"scenario", "fading", "paper_scale", "tx_antennas", "rx_antennas",
                   "users_per_cell", "power_dbm", "noise_dbm", "cell_radius_m", "rho",
                   "nakagami_shape", "sweep", "algorithms", "n_blocks", "seed", "tol",
                   "max_iters", "measure_time"},
               "experiment config");
  ExperimentConfig cfg;
  if (j.contains("scenario")) {
    const std::string s = j.at("scenario").get<std::string>();
    if (s == "single-cell") cfg.scenario = Scenario::kSingleCell;
    else if (s == "multi-cell") cfg.scenario = Scenario::kMultiCell;
    else throw ConfigError("scenario must be 'single-cell' or 'multi-cell'");
  }
  if (j.contains("fading")) {
    const std::string s = j.at("fading").get<std::string>();
    if (s == "gaussian") cfg.family = FadingFamily::kGaussian;
    else if (s == "nakagami") cfg.family = FadingFamily::kNakagami;
    else throw ConfigError("fading must be 'gaussian' or 'nakagami'");
  }
  read_if(j, "paper_scale", cfg.paper_scale);
  read_if(j, "tx_antennas", cfg.tx_antennas);
  read_if(j, "rx_antennas", cfg.rx_antennas);
  read_if(j, "users_per_cell", cfg.users_per_cell);
  read_if(j, "power_dbm", cfg.power_dbm);
  read_if(j, "noise_dbm", cfg.noise_dbm);
  read_if(j, "cell_radius_m", cfg.cell_radius_m);
  read_if(j, "rho", cfg.rho);
  read_if(j, "nakagami_shape", cfg.nakagami_shape);
  if (j.contains("sweep")) {
    const Json& s = j.at("sweep");
    require_keys(s, {"axis", "values"}, "sweep");
    const std::string axis = s.at("axis").get<std::string>();
    if (axis == "noise_dbm") cfg.axis = SweepAxis::kNoiseDbm;
    else if (axis == "rho") cfg.axis = SweepAxis::kRho;
    else if (axis == "tx_antennas") cfg.axis = SweepAxis::kTxAntennas;
    else throw ConfigError("sweep axis must be noise_dbm, rho, or tx_antennas");
    cfg.sweep = s.at("values").get<std::vector<double>>();
  }
  read_if(j, "algorithms", cfg.algorithms);
  read_if(j, "n_blocks", cfg.n_blocks);
  read_if(j, "seed", cfg.seed);
  read_if(j, "tol", cfg.stop.tol);
  read_if(j, "max_iters", cfg.stop.max_iters);
  read_if(j, "measure_time", cfg.measure_time);
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return from_json(j);
}

std::string ExperimentReport::to_csv() const {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.sweep_param + ',' + fmt_double(r.sweep_value) + ',' + r.algorithm + ',';
    out += fmt_double(r.fhat_nats) + ',' + fmt_double(r.mc_rate_nats) + ',' +
           fmt_double(r.mc_ci99_nats) + ',';
    out += std::to_string(r.iters) + ',' + fmt_double(r.iter_time_ms) + ',' +
           std::to_string(r.seed) + '\n';
  }
  return out;
}

Json ExperimentReport::to_json() const {
  Json rows_json = Json::array();
  for (const auto& r : rows) {
    rows_json.push_back(Json{{"sweep_param", r.sweep_param},
                             {"sweep_value", r.sweep_value},
                             {"algorithm", r.algorithm},
                             {"fhat_nats", r.fhat_nats},
                             {"mc_rate_nats", r.mc_rate_nats},
                             {"mc_ci99_nats", r.mc_ci99_nats},
                             {"iters", r.iters},
                             {"iter_time_ms", r.iter_time_ms},
                             {"seed", r.seed},
                             {"failed", r.failed},
                             {"error", r.error},
                             {"block_digest", r.block_digest}});
  }
  return Json{{"version", version},
              {"config_digest", config_digest},
              {"config", Json::parse(config_text.empty() ? "null" : config_text)},
              {"rows", rows_json}};
}

ExperimentReport ExperimentReport::from_json(const Json& j) {
  ExperimentReport rep;
  rep.version = j.at("version").get<std::string>();
  rep.config_digest = j.at("config_digest").get<std::string>();
  rep.config_text = j.at("config").is_null() ? "" : j.at("config").dump();
  for (const auto& rj : j.at("rows")) {
    ReportRow r;
    r.sweep_param = rj.at("sweep_param").get<std::string>();
    r.sweep_value = rj.at("sweep_value").get<double>();
    r.algorithm = rj.at("algorithm").get<std::string>();
    r.fhat_nats = rj.at("fhat_nats").get<double>();
    r.mc_rate_nats = rj.at("mc_rate_nats").get<double>();
    r.mc_ci99_nats = rj.at("mc_ci99_nats").get<double>();
    r.iters = rj.at("iters").get<int>();
    r.iter_time_ms = rj.at("iter_time_ms").get<double>();
    r.seed = rj.at("seed").get<std::uint64_t>();
    r.failed = rj.at("failed").get<bool>();
    r.error = rj.at("error").get<std::string>();
    r.block_digest = rj.at("block_digest").get<std::uint64_t>();
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

void emit_report(const ExperimentReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path dir(out_dir);
  {
    std::ofstream csv(dir / "report.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / "report.csv").string());
    csv << report.to_csv();
  }
  {
    std::ofstream js(dir / "report.json", std::ios::binary);
    if (!js) throw std::runtime_error("cannot write " + (dir / "report.json").string());
    js << report.to_json().dump(2) << '\n';
  }
}

// --- JSON codecs ----------------------------------------------------------

Json matrix_to_json(const MatrixXcd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXcd matrix_from_json(const Json& j) {
  const auto nr = static_cast<Eigen::Index>(j.size());
  const auto nc = nr > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  MatrixXcd m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r)
    for (Eigen::Index c = 0; c < nc; ++c) {
      const Json& e = j.at(r).at(c);
      m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  return m;
}

Json precoders_to_json(const PrecoderSet& p) {
  Json arr = Json::array();
  for (const auto& v : p.V) arr.push_back(matrix_to_json(v));
  return Json{{"precoders", arr}};
}

PrecoderSet precoders_from_json(const Json& j) {
  PrecoderSet p;
  for (const auto& m : j.at("precoders")) p.V.push_back(matrix_from_json(m));
  return p;
}

Json topology_to_json(const Topology& t) {
  Json bs = Json::array(), users = Json::array();
  for (const auto& b : t.bs_pos) bs.push_back(Json::array({b.x(), b.y()}));
  for (const auto& u : t.user_pos) users.push_back(Json::array({u.x(), u.y()}));
  return Json{{"bs_pos", bs},
              {"user_pos", users},
              {"link_scale", std::vector<double>(t.link_scale.data(),
                                                 t.link_scale.data() + t.link_scale.size())},
              {"wrap_around", t.wrap_around},
              {"cell_radius_m", t.cell_radius_m}};
}

Topology topology_from_json(const Json& j) {
  Topology t;
  for (const auto& b : j.at("bs_pos")) t.bs_pos.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
  for (const auto& u : j.at("user_pos")) t.user_pos.emplace_back(u.at(0).get<double>(), u.at(1).get<double>());
  const auto scale = j.at("link_scale").get<std::vector<double>>();
  t.link_scale = Eigen::Map<const VectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  t.wrap_around = j.at("wrap_around").get<bool>();
  t.cell_radius_m = j.at("cell_radius_m").get<double>();
  return t;
}

Json moments_to_json(const ChannelMoments& m) {
  Json means = Json::array(), seconds = Json::array();
  for (const auto& c : m.mean) means.push_back(matrix_to_json(c));
  for (const auto& d : m.second) seconds.push_back(matrix_to_json(d));
  return Json{{"cells", m.cells},
              {"rx_antennas", m.rx_antennas},
              {"tx_antennas", m.tx_antennas},
              {"mean", means},
              {"second", seconds}};
}

ChannelMoments moments_from_json(const Json& j) {
  ChannelMoments m;
  m.cells = j.at("cells").get<int>();
  m.rx_antennas = j.at("rx_antennas").get<int>();
  m.tx_antennas = j.at("tx_antennas").get<int>();
  for (const auto& c : j.at("mean")) m.mean.push_back(matrix_from_json(c));
  for (const auto& d : j.at("second")) m.second.push_back(matrix_from_json(d));
  return m;
}

}  // namespace stochprec
