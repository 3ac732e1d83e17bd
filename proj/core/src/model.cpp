#include "spherebot/model.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spherebot/errors.hpp"

namespace spherebot {

namespace {

constexpr double kSingularDiagonal = 1e-12;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string("model parameter '") + name + "' must be positive and finite");
  }
}

void require_tilt_in_domain(double q_r) {
  if (!(std::abs(q_r) < std::numbers::pi / 2)) {
    throw DomainError("roll angle |q_r| must be below pi/2, got " + std::to_string(q_r));
  }
}

}  // namespace

void ModelParams::validate() const {
  require_positive(m, "m");
  require_positive(m_f, "m_f");
  require_positive(m_s, "m_s");
  require_positive(I_mp, "I_mp");
  require_positive(I_mr, "I_mr");
  require_positive(I_fp, "I_fp");
  require_positive(I_fr, "I_fr");
  require_positive(I_s, "I_s");
  require_positive(I_sr, "I_sr");
  require_positive(R, "R");
  require_positive(l, "l");
  require_positive(g, "g");
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) {
    throw ConfigError("model parameter 'zeta' must be non-negative");
  }
  if (!(l < R)) {
    throw ConfigError("pendulum arm l must be shorter than the shell radius R");
  }
}

double wrap_angle(double angle) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(angle, two_pi);  // [-pi, pi]
  if (wrapped <= -std::numbers::pi) {
    wrapped += two_pi;
  }
  return wrapped;
}

Eigen::Matrix4d mass_matrix(const ModelParams& p, double alpha, double beta) {
  const double M = p.total_mass();
  Eigen::Matrix4d mm = Eigen::Matrix4d::Zero();
  mm(0, 0) = p.I_mp + p.I_fp;
  mm(0, 1) = p.m * p.l * std::cos(alpha);
  mm(1, 0) = p.m * p.R * p.l * std::cos(alpha);
  mm(1, 1) = M * p.R + p.I_s / p.R;
  mm(2, 2) = p.I_mr;
  mm(2, 3) = p.m * p.R * p.l * std::cos(beta);
  mm(3, 3) = p.I_sr + p.I_fr + M * p.R * p.R;
  return mm;
}

Eigen::Vector4d nonlinear_vector(const ModelParams& p, const PitchState& pitch,
                                 const RollState& roll, double F_fp, double F_fr) {
  const double mgl = p.m * p.g * p.l;
  const double mRl = p.m * p.R * p.l;
  const double ca = std::cos(pitch.alpha);
  const double sa = std::sin(pitch.alpha);
  const double cb = std::cos(roll.beta);
  const double sb = std::sin(roll.beta);

  Eigen::Vector4d n;
  n(0) = mgl * sa * cb + p.zeta * (pitch.alpha_dot + pitch.x_dot * ca / p.R);
  n(1) = -mRl * pitch.alpha_dot * pitch.alpha_dot * sa +
         p.zeta * (pitch.alpha_dot * ca + pitch.x_dot / p.R) + F_fp * p.R;
  n(2) = mgl * ca * sb + p.zeta * (roll.beta_dot + roll.q_r_dot * cb);
  n(3) = -mRl * roll.beta_dot * roll.beta_dot * sb +
         p.zeta * (roll.q_r_dot + roll.beta_dot * cb) + F_fr * p.R;
  return n;
}

Submodel pitch_submodel(const ModelParams& p, const PitchState& pitch, double F_fp,
                        const RollState& roll) {
  const Eigen::Matrix4d mm = mass_matrix(p, pitch.alpha, roll.beta);
  const Eigen::Vector4d n = nonlinear_vector(p, pitch, roll, F_fp, 0.0);
  return {mm.topLeftCorner<2, 2>(), n.head<2>()};
}

Submodel roll_submodel(const ModelParams& p, const RollState& roll, double F_fr,
                       const PitchState& pitch) {
  const Eigen::Matrix4d mm = mass_matrix(p, pitch.alpha, roll.beta);
  const Eigen::Vector4d n = nonlinear_vector(p, pitch, roll, 0.0, F_fr);
  return {mm.bottomRightCorner<2, 2>(), n.tail<2>()};
}

namespace {

StateSpaceTerms state_space(const Submodel& sub, const char* which) {
  if (std::abs(sub.mass(0, 0)) < kSingularDiagonal || std::abs(sub.mass(1, 1)) < kSingularDiagonal) {
    throw SingularMatrixError(std::string(which) + " sub-model mass matrix has a vanishing diagonal");
  }
  const Eigen::PartialPivLU<Eigen::Matrix2d> lu(sub.mass);
  if (std::abs(lu.determinant()) < kSingularDiagonal) {
    throw SingularMatrixError(std::string(which) + " sub-model mass matrix is singular");
  }
  const Eigen::Vector2d f = -lu.solve(sub.nonlinear);
  const Eigen::Vector2d b = lu.solve(Eigen::Vector2d::Ones());
  return {f(0), f(1), b(0), b(1)};
}

}  // namespace

RollStateSpaceTerms roll_state_space(const ModelParams& p, const RollState& roll, double F_fr,
                                     const PitchState& pitch) {
  return state_space(roll_submodel(p, roll, F_fr, pitch), "roll");
}

PitchStateSpaceTerms pitch_state_space(const ModelParams& p, const PitchState& pitch, double F_fp,
                                       const RollState& roll) {
  return state_space(pitch_submodel(p, pitch, F_fp, roll), "pitch");
}

KinematicRate kinematic_derivative(const PlanarPose& pose, double v, double q_r, double R) {
  require_tilt_in_domain(q_r);
  return {v * std::cos(pose.phi), v * std::sin(pose.phi), v * std::tan(q_r) / R};
}

KinematicRate full_kinematic_derivative(const PlanarPose& pose, double v, double q_r,
                                        double q_r_dot, double R) {
  require_tilt_in_domain(q_r);
  const double c = std::cos(pose.phi);
  const double s = std::sin(pose.phi);
  return {v * c - R * q_r_dot * s, v * s + R * q_r_dot * c, v * std::tan(q_r) / R};
}

double friction_estimate(const ModelParams& p, double v, double q_r) {
  require_tilt_in_domain(q_r);
  // R_turn = R / tan(q_r); F = M v^2 / R_turn.
  return p.total_mass() * v * v * std::tan(q_r) / p.R;
}

BetaTarget beta_target(const ModelParams& p, double v, double q_r, double alpha) {
  require_tilt_in_domain(q_r);
  const double support = p.m * p.g * p.l * std::cos(alpha);
  if (!(support > 0.0)) {
    throw DomainError("beta_target requires cos(alpha) > 0");
  }
  const double arg = friction_estimate(p, v, q_r) * p.R / support;
  BetaTarget out;
  if (arg > 1.0 || arg < -1.0) {
    out.saturated = true;
  }
  out.value = std::asin(std::clamp(arg, -1.0, 1.0));
  return out;
}

double total_energy(const ModelParams& p, const PitchState& pitch, const RollState& roll) {
  const Eigen::Matrix4d mm = mass_matrix(p, pitch.alpha, roll.beta);
  const Eigen::Matrix4d sym = 0.5 * (mm + mm.transpose());
  const Eigen::Vector4d qd(pitch.alpha_dot, pitch.x_dot, roll.beta_dot, roll.q_r_dot);
  const double kinetic = 0.5 * qd.dot(sym * qd);
  const double potential = p.m * p.g * p.l * (1.0 - std::cos(pitch.alpha) * std::cos(roll.beta));
  return kinetic + potential;
}

}  // namespace spherebot
