#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "spherebot/model.hpp"
#include "spherebot/simulator.hpp"

namespace spherebot {

// ---------------------------------------------------------------------------
// Roll-angle references (rad)

struct RollSchedule {
  double step_time = 5.0;
  double step_level = 0.17453292519943295;  // 10 deg
  double interval = 5.0;
  std::vector<double> levels{0.0, 0.17453292519943295, -0.17453292519943295,
                             0.087266462599716474, -0.087266462599716474, 0.0};
};

/// "step", "discrete" or "sine". The discrete schedule holds its last level.
double roll_reference(std::string_view name, double t, const RollSchedule& schedule = {});

// ---------------------------------------------------------------------------
// Planar trajectory references

struct ReferencePoint {
  PlanarPose pose;
  Command input;  ///< (v_ref, q_ref) from differentiating the path
};

/// Position, velocity and acceleration of a planar path at time t.
struct PathSample {
  double X = 0.0, Y = 0.0;
  double X_dot = 0.0, Y_dot = 0.0;
  double X_ddot = 0.0, Y_ddot = 0.0;
};

/// Heading atan2(Y', X'), v = |vel|, q = atan(R * phi_dot / v).
/// Throws DomainError when the path is stationary.
ReferencePoint reference_from_path(const PathSample& s, double R);

class TrajectoryRef {
 public:
  using Path = std::function<PathSample(double)>;

  TrajectoryRef(std::string name, double t_end, double R, Path path);

  /// Evaluates the path formulas at any t, including beyond the nominal
  /// domain (the planner horizon runs past the end).
  ReferencePoint at(double t) const;
  /// Same as at() but throws DomainError outside [0, t_end].
  ReferencePoint checked(double t) const;

  const std::string& name() const noexcept { return name_; }
  double t_end() const noexcept { return t_end_; }
  double radius() const noexcept { return R_; }

 private:
  std::string name_;
  double t_end_;
  double R_;
  Path path_;
};

/// "line", "sine" or "lemniscate".
TrajectoryRef make_trajectory(std::string_view name, double R);

/// Domain-checked sample of a named trajectory.
ReferencePoint trajectory_reference(std::string_view name, double t, double R);

}  // namespace spherebot
