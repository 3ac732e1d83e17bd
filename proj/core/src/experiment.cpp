#include "spherebot/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>

#include "spherebot/control.hpp"
#include "spherebot/errors.hpp"
#include "spherebot/mpc.hpp"
#include "spherebot/plot.hpp"
#include "spherebot/references.hpp"

namespace spherebot {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

/// "roll-step-0.5" -> "step", "traj-lemniscate" -> "lemniscate".
std::string profile_of(std::string_view name) {
  if (starts_with(name, "roll-step")) {
    return "step";
  }
  if (starts_with(name, "roll-")) {
    return std::string(name.substr(5));
  }
  return std::string(name.substr(5));
}

class RollCommandSource final : public CommandSource {
 public:
  RollCommandSource(std::string profile, double speed, RollSchedule schedule)
      : profile_(std::move(profile)), speed_(speed), schedule_(std::move(schedule)) {}

  CommandUpdate update(double t, const SimState& /*measured*/) override {
    return {{speed_, roll_reference(profile_, t, schedule_)}, std::nullopt};
  }

 private:
  std::string profile_;
  double speed_;
  RollSchedule schedule_;
};

double lookup(const std::map<std::string, double>& m, const std::string& key, const char* what) {
  auto it = m.find(key);
  if (it == m.end()) {
    throw ConfigError(std::string("experiment.") + what + " has no entry for '" + key + "'");
  }
  return it->second;
}

std::vector<double> column(const Trace& trace, double (*get)(const TraceSample&)) {
  std::vector<double> out;
  out.reserve(trace.samples.size());
  for (const TraceSample& s : trace.samples) {
    out.push_back(get(s));
  }
  return out;
}

double roll_deg(const TraceSample& s) { return s.state.roll.q_r * kRadToDeg; }
double roll_cmd_deg(const TraceSample& s) { return s.command.q_r * kRadToDeg; }
double time_of(const TraceSample& s) { return s.t; }

std::vector<Panel> roll_panels(const Trace& trace, const std::string& title) {
  const std::vector<double> t = column(trace, time_of);
  Panel angle{title + ": roll angle", "t (s)", "q_r (deg)", {}, false};
  angle.series.push_back({"reference", t, column(trace, roll_cmd_deg), "#d62728", true});
  angle.series.push_back({"q_r", t, column(trace, roll_deg), "#1f77b4", false});
  Panel torque{title + ": torques", "t (s)", "tau (N m)", {}, false};
  torque.series.push_back(
      {"tau_r", t, column(trace, [](const TraceSample& s) { return s.tau_r; }), "#1f77b4", false});
  torque.series.push_back(
      {"tau_p", t, column(trace, [](const TraceSample& s) { return s.tau_p; }), "#2ca02c", false});
  Panel surface{title + ": sliding surface", "t (s)", "S", {}, false};
  surface.series.push_back(
      {"S", t, column(trace, [](const TraceSample& s) { return s.S; }), "#9467bd", false});
  return {angle, torque, surface};
}

}  // namespace

std::string to_string(DirectionKind kind) { return kind == DirectionKind::kPid ? "pid" : "htsmc"; }

DirectionKind parse_direction(std::string_view name) {
  if (name == "htsmc") {
    return DirectionKind::kHtsmc;
  }
  if (name == "pid") {
    return DirectionKind::kPid;
  }
  throw ConfigError("unknown direction controller '" + std::string(name) + "'");
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"roll-step-0.5", "roll-step-1.0", "roll-discrete",
                                              "roll-sine",     "traj-line",     "traj-sine",
                                              "traj-lemniscate"};
  return names;
}

bool is_trajectory_experiment(std::string_view name) { return starts_with(name, "traj-"); }

ExperimentSpec ExperimentSpec::make(std::string name, DirectionKind controller) {
  ExperimentSpec spec;
  spec.planner_on = is_trajectory_experiment(name);
  spec.name = std::move(name);
  spec.controller = controller;
  return spec;
}

void ExperimentSpec::validate() const {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError("unknown experiment '" + name + "'");
  }
  if (is_trajectory_experiment(name) && !planner_on) {
    throw ConfigError("experiment '" + name + "' tracks a trajectory and needs the planner on");
  }
  if (!is_trajectory_experiment(name) && planner_on) {
    throw ConfigError("experiment '" + name + "' uses a fixed velocity command; planner must be off");
  }
  if (duration && !(*duration >= 0.0)) {
    throw ConfigError("experiment duration must be non-negative");
  }
}

ExperimentResult simulate_experiment(const ExperimentSpec& spec, const Config& config) {
  spec.validate();
  config.validate();

  ExperimentResult result;
  result.config = config;
  const double duration =
      spec.duration ? *spec.duration : lookup(config.experiment.duration, spec.name, "duration");
  result.config.experiment.duration[spec.name] = duration;
  result.config.simulation.seed = spec.seed;

  SimConfig sim = config.simulation;
  sim.duration = duration;
  sim.seed = spec.seed;
  if (!spec.planner_on) {
    // No planner: the roll reference is sampled at the control rate.
    sim.dt_plan = sim.dt_control;
  }

  const ModelParams& p = config.model;
  HsmcController velocity(p, config.gains.hsmc, config.gains.filters.velocity_omega);
  std::unique_ptr<DirectionController> direction;
  HtsmcController* htsmc = nullptr;
  if (spec.controller == DirectionKind::kHtsmc) {
    auto c = std::make_unique<HtsmcController>(p, config.gains.htsmc, config.gains.filters.roll_omega);
    htsmc = c.get();
    direction = std::move(c);
  } else {
    direction = std::make_unique<PidDirectionController>(config.gains.pid);
  }

  std::unique_ptr<CommandSource> commands;
  if (spec.planner_on) {
    commands = std::make_unique<MpcCommandSource>(
        MpcPlanner(config.mpc, make_trajectory(profile_of(spec.name), p.R)));
  } else {
    commands = std::make_unique<RollCommandSource>(
        profile_of(spec.name), lookup(config.experiment.speed, spec.name, "speed"),
        config.experiment.roll);
  }

  const std::string context = "experiment " + spec.name + " (" + to_string(spec.controller) + ")";
  try {
    result.trace = run(p, sim, SimState{}, velocity, *direction, *commands);
  } catch (const IntegrationFault& e) {
    throw IntegrationFault(context, e);
  } catch (const Error& e) {
    throw Error(context + ": " + e.what());
  }
  result.trace.planner_on = spec.planner_on;
  if (htsmc != nullptr) {
    result.beta_saturations = htsmc->saturation_count();
  }
  result.report = compute_metrics(spec.name, result.trace, result.config);
  return result;
}

MetricsReport compute_metrics(std::string_view experiment, const Trace& trace,
                              const Config& config) {
  if (trace.samples.empty()) {
    throw DomainError("cannot compute metrics of an empty trace");
  }
  const ExperimentConfig& ec = config.experiment;
  const std::vector<double> y = column(trace, roll_deg);
  const std::vector<double> r = column(trace, roll_cmd_deg);
  const std::size_t n = y.size();
  const double dt = trace.dt;
  MetricsReport m;

  std::size_t k = 0;
  const bool stepped = starts_with(experiment, "roll-step");
  if (stepped) {
    while (k < n && trace.samples[k].t < ec.roll.step_time - 1e-9) {
      ++k;
    }
  }
  // A trace that ends before the step carries no step response.
  if (stepped && k < n) {
    const double target = ec.roll.step_level * kRadToDeg;
    const std::span<const double> after(y.data() + k, n - k);
    m.t_r = rise_time(after, target, dt);
    m.t_s = settling_time(after, target, ec.settle_band, dt, ec.zero_band * kRadToDeg);
    std::size_t steady = k;
    if (m.t_s) {
      steady = std::min(n - 1, k + static_cast<std::size_t>(std::llround(*m.t_s / dt)));
      m.steady_start = trace.samples[steady].t;
    }
    const ErrorStats s = error_stats(y, r, {k, n, steady, n, 0, n});
    m.e_m = s.e_m;
    m.e_rmse = s.e_rmse;
    m.e_mae = s.e_mae;
    m.dh_lo = s.dh_lo;
    m.dh_hi = s.dh_hi;
  } else {
    const ErrorStats s = error_stats(y, r, ErrorWindows::whole(n));
    m.e_m = s.e_m;
    m.e_rmse = s.e_rmse;
    m.e_mae = s.e_mae;
    m.dh_lo = s.dh_lo;
    m.dh_hi = s.dh_hi;
  }

  if (is_trajectory_experiment(experiment)) {
    const TrajectoryRef ref = make_trajectory(profile_of(experiment), config.model.R);
    const PathDistance d = path_distance(trace, ref, ec.path_skip);
    m.path_mean = d.mean;
    m.path_max = d.max;
  }
  return m;
}

RunArtifacts run_experiment(const ExperimentSpec& spec, const Config& config) {
  const ExperimentResult res = simulate_experiment(spec, config);
  const std::filesystem::path dir = spec.out_dir.empty() ? std::filesystem::path(".") : spec.out_dir;
  std::filesystem::create_directories(dir);

  RunArtifacts art;
  art.report = res.report;
  art.trace_csv = dir / "trace.csv";
  write_trace_csv(res.trace, art.trace_csv);
  art.summary_csv = dir / "summary.csv";
  write_summary_csv({{spec.name, to_string(spec.controller), res.report}}, art.summary_csv);
  if (spec.planner_on) {
    art.timing_csv = dir / "timing.csv";
    write_timing_csv(res.trace, *art.timing_csv);
  }
  art.config_snapshot = dir / "config.json";
  {
    std::ofstream out(art.config_snapshot, std::ios::binary);
    out << dump_config(res.config);
    if (!out.flush()) {
      throw Error("write failed for " + art.config_snapshot.string());
    }
  }

  const std::string title = spec.name + " / " + to_string(spec.controller);
  std::vector<Panel> panels = roll_panels(res.trace, title);
  const std::vector<double> t = column(res.trace, time_of);
  if (spec.planner_on) {
    const TrajectoryRef ref = make_trajectory(profile_of(spec.name), config.model.R);
    std::vector<double> rx, ry, dist;
    for (const TraceSample& s : res.trace.samples) {
      const PlanarPose p = ref.at(s.t).pose;
      rx.push_back(p.X);
      ry.push_back(p.Y);
      dist.push_back(std::hypot(s.state.pose.X - p.X, s.state.pose.Y - p.Y));
    }
    Panel path{title + ": path", "X (m)", "Y (m)", {}, true};
    path.series.push_back({"reference", rx, ry, "#d62728", true});
    path.series.push_back({"robot",
                           column(res.trace, [](const TraceSample& s) { return s.state.pose.X; }),
                           column(res.trace, [](const TraceSample& s) { return s.state.pose.Y; }),
                           "#1f77b4", false});
    Panel distance{title + ": distance to reference", "t (s)", "d (m)", {}, false};
    distance.series.push_back({"distance", t, dist, "#1f77b4", false});
    art.plots.push_back(dir / "path.svg");
    write_svg({path, distance}, art.plots.back());
    art.plots.push_back(dir / "path.dat");
    write_dat({"t", "X", "Y", "X_ref", "Y_ref", "distance"},
              {t, path.series[1].x, path.series[1].y, rx, ry, dist}, art.plots.back());
  }
  art.plots.push_back(dir / "roll.svg");
  write_svg(panels, art.plots.back());
  art.plots.push_back(dir / "roll.dat");
  write_dat({"t", "q_r_cmd_deg", "q_r_deg", "tau_r", "tau_p", "S"},
            {t, panels[0].series[0].y, panels[0].series[1].y, panels[1].series[0].y,
             panels[1].series[1].y, panels[2].series[0].y},
            art.plots.back());
  return art;
}

RunArtifacts run_experiment(const ExperimentSpec& spec, const std::filesystem::path& config_path) {
  return run_experiment(spec, load_config(config_path));
}

std::vector<SummaryRow> run_roster(const Config& config, const std::filesystem::path& out_root,
                                   std::uint64_t seed) {
  std::vector<SummaryRow> rows;
  for (const std::string& name : experiment_names()) {
    for (DirectionKind kind : {DirectionKind::kHtsmc, DirectionKind::kPid}) {
      ExperimentSpec spec = ExperimentSpec::make(name, kind);
      spec.seed = seed;
      spec.out_dir = out_root / name / to_string(kind);
      const RunArtifacts art = run_experiment(spec, config);
      rows.push_back({name, to_string(kind), art.report});
    }
  }
  write_summary_csv(rows, out_root / "summary.csv");
  return rows;
}

}  // namespace spherebot
