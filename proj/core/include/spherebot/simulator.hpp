#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "spherebot/model.hpp"

namespace spherebot {

struct SimState {
  PitchState pitch;
  RollState roll;
  PlanarPose pose;
  double t = 0.0;
};

/// Time derivative of every SimState component except t.
struct SimStateRate {
  double alpha_dot = 0.0;
  double x_dot = 0.0;
  double alpha_ddot = 0.0;
  double x_ddot = 0.0;
  double beta_dot = 0.0;
  double q_r_dot = 0.0;
  double beta_ddot = 0.0;
  double q_r_ddot = 0.0;
  double X_dot = 0.0;
  double Y_dot = 0.0;
  double phi_dot = 0.0;
};

inline constexpr int kStateDim = 11;
using StateVector = Eigen::Matrix<double, kStateDim, 1>;

StateVector pack(const SimState& s);
SimState unpack(const StateVector& v, double t);
StateVector pack(const SimStateRate& r);

enum class FrictionMode {
  kCentripetalEstimate,  ///< F_fr = friction_estimate(v, q_r), F_fp = 0
  kZero,
};

struct MeasurementNoise {
  double angle_std = 0.0;  ///< alpha, beta, q_r, phi (rad)
  double rate_std = 0.0;   ///< angular rates (rad/s)
  double velocity_std = 0.0;
  double position_std = 0.0;  ///< x, X, Y (m)
};

struct SimConfig {
  double dt_physics = 0.001;
  double dt_control = 0.02;
  double dt_plan = 0.1;
  double duration = 0.0;
  FrictionMode friction_mode = FrictionMode::kCentripetalEstimate;
  double tau_max = 5.0;
  MeasurementNoise noise;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless dt_physics <= dt_control <= dt_plan with
  /// integer ratios and duration a non-negative multiple of dt_control.
  void validate() const;
};

/// q_ddot from the two sub-models, pose rates from the full kinematics
/// including the roll-rate terms.
SimStateRate derivative(const ModelParams& p, const SimState& state, double tau_p, double tau_r,
                        FrictionMode friction = FrictionMode::kCentripetalEstimate);

/// Classical RK4 with zero-order-hold torques. phi is wrapped after the step.
/// Throws IntegrationFault on any non-finite component.
SimState rk4_step(const ModelParams& p, const SimState& state, double tau_p, double tau_r,
                  double dt, FrictionMode friction = FrictionMode::kCentripetalEstimate);

/// Idealized sensor: exact state plus optional Gaussian noise.
class Sensor {
 public:
  Sensor(MeasurementNoise noise, std::uint64_t seed);

  SimState measure(const SimState& state);

 private:
  double perturb(double value, double std_dev);

  MeasurementNoise noise_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> unit_{0.0, 1.0};
};

// ---------------------------------------------------------------------------
// Closed-loop plumbing

struct Command {
  double v = 0.0;
  double q_r = 0.0;
};

struct SolverStats {
  int iterations = 0;
  double kkt_residual = 0.0;
  double objective = 0.0;
  double solve_time_ms = 0.0;
  bool flagged = false;
};

struct CommandUpdate {
  Command command;
  std::optional<SolverStats> stats;
};

/// Supplies (v, q_r) commands; called every dt_plan.
class CommandSource {
 public:
  virtual ~CommandSource() = default;
  virtual CommandUpdate update(double t, const SimState& measured) = 0;
};

struct DirectionOutput {
  double tau = 0.0;
  double S1 = 0.0;
  double S2 = 0.0;
  double S = 0.0;
  double beta_d = 0.0;
};

/// Roll-angle (steering) torque law; called every dt_control.
class DirectionController {
 public:
  virtual ~DirectionController() = default;
  virtual DirectionOutput compute(const SimState& measured, const Command& command, double dt) = 0;
  /// dS/dt of the second-layer surface at the last compute() instant, given
  /// the true plant rates under the applied torque. Zero for controllers
  /// without a sliding surface.
  virtual double surface_rate(const SimState& /*measured*/, const SimStateRate& /*rate*/) const {
    return 0.0;
  }
};

/// Forward-velocity torque law; called every dt_control.
class VelocityController {
 public:
  virtual ~VelocityController() = default;
  virtual double compute(const SimState& measured, const Command& command, double dt) = 0;
};

struct TraceSample {
  double t = 0.0;
  SimState state;
  double tau_p = 0.0;
  double tau_r = 0.0;
  Command command;
  double S1 = 0.0;
  double S2 = 0.0;
  double S = 0.0;
  double beta_d = 0.0;
  double L = 0.0;
  double L_dot = 0.0;
  std::optional<SolverStats> solver;
};

struct Trace {
  double dt = 0.0;
  bool planner_on = false;
  std::vector<TraceSample> samples;
};

/// Runs the multi-rate loop: commands every dt_plan, torques every
/// dt_control from zero-order-held measurements, physics every dt_physics.
/// Integrator faults propagate as IntegrationFault carrying the failing time.
Trace run(const ModelParams& p, const SimConfig& config, const SimState& initial,
          VelocityController& velocity, DirectionController& direction, CommandSource& commands);

}  // namespace spherebot
