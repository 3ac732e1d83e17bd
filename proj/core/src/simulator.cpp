#include "spherebot/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "spherebot/control.hpp"
#include "spherebot/errors.hpp"

namespace spherebot {

namespace {

/// Returns n if value/base is within 1e-9 of an integer n >= 1.
long checked_ratio(double value, double base, const char* what) {
  const double ratio = value / base;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError(std::string(what) + " must be a positive integer multiple");
  }
  return static_cast<long>(rounded);
}

SimState add_scaled(const SimState& s, const SimStateRate& r, double h) {
  SimState out = s;
  out.pitch.alpha += h * r.alpha_dot;
  out.pitch.x += h * r.x_dot;
  out.pitch.alpha_dot += h * r.alpha_ddot;
  out.pitch.x_dot += h * r.x_ddot;
  out.roll.beta += h * r.beta_dot;
  out.roll.q_r += h * r.q_r_dot;
  out.roll.beta_dot += h * r.beta_ddot;
  out.roll.q_r_dot += h * r.q_r_ddot;
  out.pose.X += h * r.X_dot;
  out.pose.Y += h * r.Y_dot;
  out.pose.phi += h * r.phi_dot;
  out.t += h;
  return out;
}

double clamp_torque(double tau, double limit) {
  if (!std::isfinite(tau)) {
    return tau;
  }
  return std::clamp(tau, -limit, limit);
}

}  // namespace

StateVector pack(const SimState& s) {
  StateVector v;
  v << s.pitch.alpha, s.pitch.x, s.pitch.alpha_dot, s.pitch.x_dot, s.roll.beta, s.roll.q_r,
      s.roll.beta_dot, s.roll.q_r_dot, s.pose.X, s.pose.Y, s.pose.phi;
  return v;
}

SimState unpack(const StateVector& v, double t) {
  SimState s;
  s.pitch = {v(0), v(1), v(2), v(3)};
  s.roll = {v(4), v(5), v(6), v(7)};
  s.pose = {v(8), v(9), v(10)};
  s.t = t;
  return s;
}

StateVector pack(const SimStateRate& r) {
  StateVector v;
  v << r.alpha_dot, r.x_dot, r.alpha_ddot, r.x_ddot, r.beta_dot, r.q_r_dot, r.beta_ddot,
      r.q_r_ddot, r.X_dot, r.Y_dot, r.phi_dot;
  return v;
}

void SimConfig::validate() const {
  if (!(dt_physics > 0.0)) {
    throw ConfigError("dt_physics must be positive");
  }
  checked_ratio(dt_control, dt_physics, "dt_control / dt_physics");
  checked_ratio(dt_plan, dt_control, "dt_plan / dt_control");
  if (!(duration >= 0.0)) {
    throw ConfigError("duration must be non-negative");
  }
  if (duration > 0.0) {
    checked_ratio(duration, dt_control, "duration / dt_control");
  }
  if (!(tau_max > 0.0)) {
    throw ConfigError("tau_max must be positive");
  }
}

SimStateRate derivative(const ModelParams& p, const SimState& state, double tau_p, double tau_r,
                        FrictionMode friction) {
  const double F_fp = 0.0;
  const double F_fr = friction == FrictionMode::kCentripetalEstimate
                          ? friction_estimate(p, state.pitch.x_dot, state.roll.q_r)
                          : 0.0;

  const Submodel pitch = pitch_submodel(p, state.pitch, F_fp, state.roll);
  const Submodel roll = roll_submodel(p, state.roll, F_fr, state.pitch);

  const Eigen::PartialPivLU<Eigen::Matrix2d> lu_p(pitch.mass);
  const Eigen::PartialPivLU<Eigen::Matrix2d> lu_r(roll.mass);
  if (std::abs(lu_p.determinant()) < 1e-12 || std::abs(lu_r.determinant()) < 1e-12) {
    throw SingularMatrixError("sub-model mass matrix is singular");
  }
  const Eigen::Vector2d qdd_p = lu_p.solve(Eigen::Vector2d::Constant(tau_p) - pitch.nonlinear);
  const Eigen::Vector2d qdd_r = lu_r.solve(Eigen::Vector2d::Constant(tau_r) - roll.nonlinear);

  const KinematicRate kin = full_kinematic_derivative(state.pose, state.pitch.x_dot, state.roll.q_r,
                                                      state.roll.q_r_dot, p.R);
  SimStateRate r;
  r.alpha_dot = state.pitch.alpha_dot;
  r.x_dot = state.pitch.x_dot;
  r.alpha_ddot = qdd_p(0);
  r.x_ddot = qdd_p(1);
  r.beta_dot = state.roll.beta_dot;
  r.q_r_dot = state.roll.q_r_dot;
  r.beta_ddot = qdd_r(0);
  r.q_r_ddot = qdd_r(1);
  r.X_dot = kin.X_dot;
  r.Y_dot = kin.Y_dot;
  r.phi_dot = kin.phi_dot;
  return r;
}

SimState rk4_step(const ModelParams& p, const SimState& state, double tau_p, double tau_r,
                  double dt, FrictionMode friction) {
  if (!(dt > 0.0)) {
    throw DomainError("rk4_step requires dt > 0");
  }
  SimState next;
  try {
    const SimStateRate k1 = derivative(p, state, tau_p, tau_r, friction);
    const SimStateRate k2 = derivative(p, add_scaled(state, k1, dt / 2), tau_p, tau_r, friction);
    const SimStateRate k3 = derivative(p, add_scaled(state, k2, dt / 2), tau_p, tau_r, friction);
    const SimStateRate k4 = derivative(p, add_scaled(state, k3, dt), tau_p, tau_r, friction);
    const StateVector incr =
        (pack(k1) + 2.0 * pack(k2) + 2.0 * pack(k3) + pack(k4)) * (dt / 6.0);
    next = unpack(pack(state) + incr, state.t + dt);
  } catch (const DomainError& e) {
    throw IntegrationFault(std::string("integrator left the model domain: ") + e.what(), state.t);
  }
  if (!pack(next).allFinite()) {
    throw IntegrationFault("non-finite state", state.t);
  }
  next.pose.phi = wrap_angle(next.pose.phi);
  return next;
}

Sensor::Sensor(MeasurementNoise noise, std::uint64_t seed) : noise_(noise), engine_(seed) {}

double Sensor::perturb(double value, double std_dev) {
  if (std_dev <= 0.0) {
    return value;
  }
  return value + std_dev * unit_(engine_);
}

SimState Sensor::measure(const SimState& state) {
  SimState m = state;
  m.pitch.alpha = perturb(m.pitch.alpha, noise_.angle_std);
  m.pitch.x = perturb(m.pitch.x, noise_.position_std);
  m.pitch.alpha_dot = perturb(m.pitch.alpha_dot, noise_.rate_std);
  m.pitch.x_dot = perturb(m.pitch.x_dot, noise_.velocity_std);
  m.roll.beta = perturb(m.roll.beta, noise_.angle_std);
  m.roll.q_r = perturb(m.roll.q_r, noise_.angle_std);
  m.roll.beta_dot = perturb(m.roll.beta_dot, noise_.rate_std);
  m.roll.q_r_dot = perturb(m.roll.q_r_dot, noise_.rate_std);
  m.pose.X = perturb(m.pose.X, noise_.position_std);
  m.pose.Y = perturb(m.pose.Y, noise_.position_std);
  m.pose.phi = wrap_angle(perturb(m.pose.phi, noise_.angle_std));
  return m;
}

Trace run(const ModelParams& p, const SimConfig& config, const SimState& initial,
          VelocityController& velocity, DirectionController& direction, CommandSource& commands) {
  p.validate();
  config.validate();

  const long per_control = checked_ratio(config.dt_control, config.dt_physics, "dt_control");
  const long per_plan = per_control * checked_ratio(config.dt_plan, config.dt_control, "dt_plan");
  const long steps = static_cast<long>(std::llround(config.duration / config.dt_physics));

  Trace trace;
  trace.dt = config.dt_control;
  trace.samples.reserve(static_cast<std::size_t>(steps / per_control + 1));

  Sensor sensor(config.noise, config.seed);
  SimState state = initial;
  state.t = 0.0;

  Command command;
  std::optional<SolverStats> stats;
  double tau_p = 0.0;
  double tau_r = 0.0;

  for (long i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * config.dt_physics;
    state.t = t;

    if (i % per_control == 0) {
      const SimState measured = sensor.measure(state);
      if (i % per_plan == 0) {
        CommandUpdate update = commands.update(t, measured);
        command = update.command;
        stats = update.stats;
        if (stats) {
          trace.planner_on = true;
        }
      }
      tau_p = clamp_torque(velocity.compute(measured, command, config.dt_control), config.tau_max);
      const DirectionOutput dir = direction.compute(measured, command, config.dt_control);
      tau_r = clamp_torque(dir.tau, config.tau_max);
      if (!std::isfinite(tau_p) || !std::isfinite(tau_r)) {
        throw IntegrationFault("controller produced a non-finite torque", t);
      }

      const SimStateRate plant_rate = derivative(p, state, tau_p, tau_r, config.friction_mode);
      const double S_dot = direction.surface_rate(measured, plant_rate);

      TraceSample sample;
      sample.t = t;
      sample.state = state;
      sample.tau_p = tau_p;
      sample.tau_r = tau_r;
      sample.command = command;
      sample.S1 = dir.S1;
      sample.S2 = dir.S2;
      sample.S = dir.S;
      sample.beta_d = dir.beta_d;
      sample.L = lyapunov_value(dir.S);
      sample.L_dot = lyapunov_rate(dir.S, S_dot);
      sample.solver = stats;
      trace.samples.push_back(sample);
    }

    if (i < steps) {
      state = rk4_step(p, state, tau_p, tau_r, config.dt_physics, config.friction_mode);
    }
  }
  return trace;
}

}  // namespace spherebot
