#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "spherebot/control.hpp"
#include "spherebot/model.hpp"
#include "spherebot/mpc.hpp"
#include "spherebot/references.hpp"
#include "spherebot/simulator.hpp"

namespace spherebot {

struct FilterConfig {
  double roll_omega = 20.0;      ///< q_rd and beta_d filters (rad/s)
  double velocity_omega = 5.0;   ///< v_d filter (rad/s)
};

struct GainsConfig {
  HtsmcGains htsmc;
  HsmcGains hsmc;
  PidGains pid;
  FilterConfig filters;
};

struct ExperimentConfig {
  RollSchedule roll;
  std::map<std::string, double> duration;  ///< per experiment name (s)
  std::map<std::string, double> speed;     ///< fixed v command per roll experiment (m/s)
  double settle_band = 0.05;
  double zero_band = 0.00872664625997164788;  ///< 0.5 deg
  double path_skip = 5.0;
};

struct Config {
  ModelParams model;
  GainsConfig gains;
  MpcConfig mpc;
  SimConfig simulation;  ///< duration and seed are filled per run
  ExperimentConfig experiment;

  void validate() const;
};

/// Parses JSON text. Unknown or missing keys are ConfigErrors.
Config parse_config(const std::string& text);
/// Reads and parses a file; errors carry the path.
Config load_config(const std::filesystem::path& path);
/// Canonical JSON; parse_config(dump_config(c)) reproduces c exactly.
std::string dump_config(const Config& config);

}  // namespace spherebot
