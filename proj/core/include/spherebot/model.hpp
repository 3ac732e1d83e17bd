#pragma once

#include <Eigen/Core>

namespace spherebot {

/// Physical constants of the pendulum-driven sphere. No defaults: values come
/// from the configuration file.
struct ModelParams {
  double m = 0.0;     ///< pendulum mass (kg)
  double m_f = 0.0;   ///< frame mass (kg)
  double m_s = 0.0;   ///< shell mass (kg)
  double I_mp = 0.0;  ///< pendulum inertia, pitch (kg m^2)
  double I_mr = 0.0;  ///< pendulum inertia, roll (kg m^2)
  double I_fp = 0.0;  ///< frame inertia, pitch (kg m^2)
  double I_fr = 0.0;  ///< frame inertia, roll (kg m^2)
  double I_s = 0.0;   ///< shell inertia, pitch (kg m^2)
  double I_sr = 0.0;  ///< shell inertia, roll (kg m^2)
  double R = 0.0;     ///< shell radius (m)
  double l = 0.0;     ///< pendulum arm length (m)
  double zeta = 0.0;  ///< viscous damping (N m s)
  double g = 0.0;     ///< gravity (m/s^2)

  /// M = m + m_f + m_s.
  double total_mass() const noexcept { return m + m_f + m_s; }

  /// Throws ConfigError if any invariant is violated.
  void validate() const;
};

/// Pitch sub-model coordinates. v = x_dot.
struct PitchState {
  double alpha = 0.0;
  double x = 0.0;
  double alpha_dot = 0.0;
  double x_dot = 0.0;
};

/// Roll sub-model coordinates, chi = [beta, beta_dot, q_r, q_r_dot].
struct RollState {
  double beta = 0.0;
  double q_r = 0.0;
  double beta_dot = 0.0;
  double q_r_dot = 0.0;
};

struct PlanarPose {
  double X = 0.0;
  double Y = 0.0;
  double phi = 0.0;
};

/// q_ddot = f + b * tau for one 2-DOF sub-model.
struct StateSpaceTerms {
  double f1 = 0.0;
  double f2 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
};
using RollStateSpaceTerms = StateSpaceTerms;
using PitchStateSpaceTerms = StateSpaceTerms;

struct Submodel {
  Eigen::Matrix2d mass;
  Eigen::Vector2d nonlinear;
};

struct KinematicRate {
  double X_dot = 0.0;
  double Y_dot = 0.0;
  double phi_dot = 0.0;
};

/// Pendulum roll target. `saturated` is set when the arcsin argument left
/// [-1, 1] and was clamped.
struct BetaTarget {
  double value = 0.0;
  bool saturated = false;
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle) noexcept;

/// Inertia matrix M(q), exactly as printed (asymmetric pitch block,
/// upper-triangular roll block).
Eigen::Matrix4d mass_matrix(const ModelParams& p, double alpha, double beta);

/// N(q, q_dot): gravity, centrifugal, damping and friction-moment terms.
Eigen::Vector4d nonlinear_vector(const ModelParams& p, const PitchState& pitch,
                                 const RollState& roll, double F_fp, double F_fr);

/// Upper-left block of M and N[0..1]. The pitch rows of N depend on beta
/// through cos(beta), hence the roll argument.
Submodel pitch_submodel(const ModelParams& p, const PitchState& pitch, double F_fp,
                        const RollState& roll = {});

/// Lower-right block of M and N[2..3]. The roll rows of N depend on alpha
/// through cos(alpha).
Submodel roll_submodel(const ModelParams& p, const RollState& roll, double F_fr,
                       const PitchState& pitch = {});

/// f = -M_r^{-1} N_r, b = M_r^{-1} [1, 1]^T.
/// Throws SingularMatrixError if a diagonal entry of M_r is below 1e-12.
RollStateSpaceTerms roll_state_space(const ModelParams& p, const RollState& roll,
                                     double F_fr, const PitchState& pitch = {});

/// Same construction on the pitch sub-model (used by the velocity controller).
PitchStateSpaceTerms pitch_state_space(const ModelParams& p, const PitchState& pitch,
                                       double F_fp, const RollState& roll = {});

/// Simplified no-slip kinematics: (v cos phi, v sin phi, v tan(q_r) / R).
KinematicRate kinematic_derivative(const PlanarPose& pose, double v, double q_r, double R);

/// Full kinematics including the roll-rate terms R q_r_dot.
KinematicRate full_kinematic_derivative(const PlanarPose& pose, double v, double q_r,
                                        double q_r_dot, double R);

/// Lateral friction needed for a no-slip turn: M v^2 tan(q_r) / R.
double friction_estimate(const ModelParams& p, double v, double q_r);

/// beta_d = asin(M v^2 tan(q_r) / (m g l cos(alpha))), clamped and flagged
/// when the turn is infeasible.
BetaTarget beta_target(const ModelParams& p, double v, double q_r, double alpha);

/// 1/2 q_dot^T sym(M) q_dot + m g l (1 - cos(alpha) cos(beta)).
double total_energy(const ModelParams& p, const PitchState& pitch, const RollState& roll);

}  // namespace spherebot
