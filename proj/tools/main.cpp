#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "spherebot/config.hpp"
#include "spherebot/errors.hpp"
#include "spherebot/experiment.hpp"
#include "spherebot/trace_io.hpp"

namespace fs = std::filesystem;
using namespace spherebot;

namespace {

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) {
    return flag;
  }
  if (const char* env = std::getenv("SPHEREBOT_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pendulum-driven spherical robot: closed-loop experiments and metrics"};
  app.require_subcommand(1);

  std::string experiment;
  std::string config_path = SPHEREBOT_DEFAULT_CONFIG;
  std::string out;
  std::uint64_t seed = 0;
  std::string controller = "htsmc";
  std::optional<double> duration;
  bool all = false;

  auto* run = app.add_subcommand("run", "Run one experiment (or the full roster with --all)");
  run->add_option("--experiment", experiment, "Experiment name")
      ->check(CLI::IsMember(experiment_names()));
  run->add_option("--config", config_path, "Config file (JSON)")->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory (default $SPHEREBOT_OUT_DIR or ./out)");
  run->add_option("--seed", seed, "Measurement-noise seed");
  run->add_option("--controller", controller, "Direction controller")
      ->check(CLI::IsMember({"htsmc", "pid"}));
  run->add_option("--duration", duration, "Override the configured duration (s)");
  run->add_flag("--all", all, "Every experiment with both direction controllers");

  std::string trace_path;
  std::string metrics_experiment;
  auto* metrics = app.add_subcommand("metrics", "Recompute a summary row from a stored trace");
  metrics->add_option("--trace", trace_path, "Trace CSV")->required()->check(CLI::ExistingFile);
  metrics->add_option("--experiment", metrics_experiment, "Experiment the trace came from")
      ->check(CLI::IsMember(experiment_names()));
  metrics->add_option("--config", config_path, "Config file (JSON)")->check(CLI::ExistingFile);
  metrics->add_option("--controller", controller, "Label for the controller column");

  CLI11_PARSE(app, argc, argv);

  try {
    const Config config = load_config(config_path);
    if (*run) {
      const fs::path dir = output_dir(out);
      if (all) {
        const std::vector<SummaryRow> rows = run_roster(config, dir, seed);
        write_summary_csv(rows, std::cout);
        return 0;
      }
      if (experiment.empty()) {
        std::cerr << "spherebot: run needs --experiment or --all\n";
        return 2;
      }
      ExperimentSpec spec = ExperimentSpec::make(experiment, parse_direction(controller));
      spec.seed = seed;
      spec.duration = duration;
      spec.out_dir = dir;
      const RunArtifacts art = run_experiment(spec, config);
      write_summary_csv({{experiment, controller, art.report}}, std::cout);
      std::cerr << "wrote " << art.trace_csv.string() << '\n';
      return 0;
    }
    const Trace trace = read_trace_csv(fs::path(trace_path));
    const MetricsReport report = compute_metrics(metrics_experiment, trace, config);
    write_summary_csv({{metrics_experiment, controller, report}}, std::cout);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "spherebot: error: " << e.what() << '\n';
    return 1;
  }
}
