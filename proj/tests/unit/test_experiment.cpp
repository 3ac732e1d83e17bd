#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spherebot/errors.hpp"
#include "spherebot/experiment.hpp"
#include "support.hpp"

namespace spherebot {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("spherebot_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(Experiment, RosterNames) {
  const auto& names = experiment_names();
  ASSERT_EQ(names.size(), 7u);
  EXPECT_TRUE(is_trajectory_experiment("traj-line"));
  EXPECT_FALSE(is_trajectory_experiment("roll-sine"));
  EXPECT_EQ(parse_direction("pid"), DirectionKind::kPid);
  EXPECT_EQ(to_string(DirectionKind::kHtsmc), "htsmc");
  EXPECT_THROW(parse_direction("fuzzy"), ConfigError);
}

TEST(Experiment, SpecValidation) {
  EXPECT_NO_THROW(ExperimentSpec::make("traj-sine").validate());
  ExperimentSpec planner_off = ExperimentSpec::make("traj-line");
  planner_off.planner_on = false;
  EXPECT_THROW(planner_off.validate(), ConfigError);
  ExperimentSpec planner_on = ExperimentSpec::make("roll-step-0.5");
  planner_on.planner_on = true;
  EXPECT_THROW(planner_on.validate(), ConfigError);
  EXPECT_THROW(ExperimentSpec::make("roll-step-2.0").validate(), ConfigError);
}

TEST(Experiment, RollStepHtsmcBeatsPid) {
  const Config c = testing::default_config();
  const MetricsReport h = simulate_experiment(ExperimentSpec::make("roll-step-0.5"), c).report;
  const MetricsReport p =
      simulate_experiment(ExperimentSpec::make("roll-step-0.5", DirectionKind::kPid), c).report;
  ASSERT_TRUE(h.t_r && p.t_r);
  EXPECT_LT(*h.t_r, *p.t_r);
  EXPECT_LT(h.e_rmse, p.e_rmse);
}

TEST(Experiment, MirroredCommandGivesMirroredTorques) {
  Config c = testing::default_config();
  c.experiment.roll.step_level = -c.experiment.roll.step_level;
  ExperimentSpec spec = ExperimentSpec::make("roll-step-0.5");
  spec.duration = 8.0;
  const Trace neg = simulate_experiment(spec, c).trace;
  const Trace pos = simulate_experiment(spec, testing::default_config()).trace;
  ASSERT_EQ(neg.samples.size(), pos.samples.size());
  for (std::size_t i = 0; i < pos.samples.size(); ++i) {
    EXPECT_NEAR(neg.samples[i].tau_r, -pos.samples[i].tau_r, 1e-9);
    EXPECT_NEAR(neg.samples[i].state.roll.q_r, -pos.samples[i].state.roll.q_r, 1e-12);
  }
}

TEST(Experiment, MetricsFromStoredTraceMatch) {
  const Config c = testing::default_config();
  const ExperimentResult r = simulate_experiment(ExperimentSpec::make("roll-sine"), c);
  std::stringstream csv;
  write_trace_csv(r.trace, csv);
  const MetricsReport again = compute_metrics("roll-sine", read_trace_csv(csv), c);
  EXPECT_NEAR(again.e_mae, r.report.e_mae, 1e-12);
  EXPECT_NEAR(again.e_rmse, r.report.e_rmse, 1e-12);
}

TEST(Experiment, ZeroDurationRunEmitsOneRow) {
  ExperimentSpec spec = ExperimentSpec::make("roll-step-1.0");
  spec.duration = 0.0;
  spec.out_dir = scratch("zero");
  const RunArtifacts a = run_experiment(spec, testing::default_config());
  std::ifstream in(a.trace_csv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2);
  fs::remove_all(spec.out_dir);
}

TEST(Experiment, RepeatedRunsAreByteIdentical) {
  for (const char* name : {"roll-discrete", "traj-line"}) {
    ExperimentSpec spec = ExperimentSpec::make(name);
    spec.duration = 3.0;
    spec.seed = 5;
    spec.out_dir = scratch("repeat_a");
    const RunArtifacts a = run_experiment(spec, testing::default_config());
    spec.out_dir = scratch("repeat_b");
    const RunArtifacts b = run_experiment(spec, testing::default_config());
    EXPECT_EQ(slurp(a.trace_csv), slurp(b.trace_csv)) << name;
    EXPECT_EQ(slurp(a.summary_csv), slurp(b.summary_csv)) << name;
    fs::remove_all(a.trace_csv.parent_path());
    fs::remove_all(b.trace_csv.parent_path());
  }
}

TEST(Experiment, ConfigSnapshotReproducesRun) {
  ExperimentSpec spec = ExperimentSpec::make("traj-sine");
  spec.duration = 2.0;
  spec.out_dir = scratch("snap_a");
  const RunArtifacts a = run_experiment(spec, testing::default_config());
  ASSERT_TRUE(a.timing_csv.has_value());
  EXPECT_FALSE(a.plots.empty());
  spec.duration.reset();
  spec.out_dir = scratch("snap_b");
  const RunArtifacts b = run_experiment(spec, a.config_snapshot);
  EXPECT_EQ(slurp(a.trace_csv), slurp(b.trace_csv));
  EXPECT_EQ(slurp(a.config_snapshot), slurp(b.config_snapshot));
  fs::remove_all(scratch("snap_a"));
  fs::remove_all(scratch("snap_b"));
}

TEST(Experiment, RollTracePlannerColumnsAbsent) {
  ExperimentSpec spec = ExperimentSpec::make("roll-step-0.5");
  spec.duration = 1.0;
  const ExperimentResult r = simulate_experiment(spec, testing::default_config());
  EXPECT_FALSE(r.trace.planner_on);
  ExperimentSpec traj = ExperimentSpec::make("traj-lemniscate");
  traj.duration = 1.0;
  const ExperimentResult t = simulate_experiment(traj, testing::default_config());
  EXPECT_TRUE(t.trace.planner_on);
  // Planner commands change only on planning instants.
  for (std::size_t i = 1; i < t.trace.samples.size(); ++i) {
    if (i % 5 != 0) {
      EXPECT_EQ(t.trace.samples[i].command.v, t.trace.samples[i - 1].command.v);
      EXPECT_EQ(t.trace.samples[i].command.q_r, t.trace.samples[i - 1].command.q_r);
    }
  }
}

}  // namespace
}  // namespace spherebot
