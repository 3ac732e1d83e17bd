#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spherebot/config.hpp"
#include "spherebot/metrics.hpp"
#include "spherebot/simulator.hpp"
#include "spherebot/trace_io.hpp"

namespace spherebot {

enum class DirectionKind { kHtsmc, kPid };

std::string to_string(DirectionKind kind);
DirectionKind parse_direction(std::string_view name);

/// roll-step-0.5, roll-step-1.0, roll-discrete, roll-sine, traj-line,
/// traj-sine, traj-lemniscate.
const std::vector<std::string>& experiment_names();
bool is_trajectory_experiment(std::string_view name);

struct ExperimentSpec {
  std::string name;
  DirectionKind controller = DirectionKind::kHtsmc;
  bool planner_on = false;
  std::optional<double> duration;  ///< overrides the configured duration
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;

  /// Planner flag follows the experiment family.
  static ExperimentSpec make(std::string name, DirectionKind controller = DirectionKind::kHtsmc);

  /// Throws ConfigError for unknown names or a planner flag that does not
  /// match the experiment family.
  void validate() const;
};

struct ExperimentResult {
  Trace trace;
  MetricsReport report;
  Config config;  ///< as run, with seed and duration filled in
  int beta_saturations = 0;
};

/// Runs the closed loop from rest at the origin. No files are written.
ExperimentResult simulate_experiment(const ExperimentSpec& spec, const Config& config);

/// Indicators for a named experiment; roll errors are in degrees.
/// An empty name gives whole-trace roll statistics only.
MetricsReport compute_metrics(std::string_view experiment, const Trace& trace,
                              const Config& config);

struct RunArtifacts {
  std::filesystem::path trace_csv;
  std::filesystem::path summary_csv;
  std::optional<std::filesystem::path> timing_csv;
  std::vector<std::filesystem::path> plots;
  std::filesystem::path config_snapshot;
  MetricsReport report;
};

RunArtifacts run_experiment(const ExperimentSpec& spec, const Config& config);
RunArtifacts run_experiment(const ExperimentSpec& spec, const std::filesystem::path& config_path);

/// Every experiment with both direction controllers under out_root/<name>/<ctrl>,
/// plus out_root/summary.csv.
std::vector<SummaryRow> run_roster(const Config& config, const std::filesystem::path& out_root,
                                   std::uint64_t seed);

}  // namespace spherebot
