#pragma once

#include "spherebot/model.hpp"
#include "spherebot/simulator.hpp"

namespace spherebot {

/// Gains of the hierarchical terminal sliding-mode direction controller.
///
/// First layer: S1 = de_r + a1 e_r + c1 e_r^(p1/q1) on the roll error and
/// S2 = de_b + a2 e_b + c2 e_b^(p2/q2) on the pendulum swing error.
/// Second layer: S = A S1 + B S2, driven by dS = -k S - eps sat(S).
struct HtsmcGains {
  double a1 = 0.0;
  double c1 = 0.0;
  int p1 = 1;
  int q1 = 2;
  double a2 = 0.0;
  double c2 = 0.0;
  int p2 = 1;
  int q2 = 2;
  double A = 0.0;
  double B = 0.0;
  double k = 0.0;
  double eps = 0.0;
  double e_sing = 1e-3;    ///< |e| floor inside the negative-exponent term (rad)
  double bl_width = 0.0;   ///< boundary-layer half width; 0 selects sgn(S)

  void validate() const;
};

/// Two-layer linear sliding-mode velocity controller.
///   s1 = e_v + lambda1 * e_x   (e_v = v - v_d, e_x = integral of e_v)
///   s2 = alpha_dot + lambda2 * alpha
///   S_v = A_v s1 + B_v s2
struct HsmcGains {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double A_v = 0.0;
  double B_v = 0.0;
  double k_v = 0.0;
  double eps_v = 0.0;
  double bl_width = 0.0;

  void validate() const;
};

struct PidGains {
  double k_p = 0.0;
  double k_i = 0.0;
  double k_d = 0.0;
  double integral_clamp = 1.0;
  double output_clamp = 1.0;

  void validate() const;
};

/// A smoothed reference together with its first two time derivatives.
struct RefSignal {
  double value = 0.0;
  double rate = 0.0;
  double accel = 0.0;
};

/// Critically damped second-order command filter
///   x'' = w^2 (u - x) - 2 w x'
/// propagated in closed form under a held input. The first sample
/// initializes the state at rest on the input.
class CommandFilter {
 public:
  explicit CommandFilter(double omega);

  /// Filter output at the current instant for input u (held from now on).
  RefSignal sample(double input);
  /// Propagates the state dt seconds with the last sampled input.
  void advance(double dt);
  RefSignal update(double input, double dt) {
    const RefSignal out = sample(input);
    advance(dt);
    return out;
  }
  void reset() { primed_ = false; }
  double omega() const noexcept { return omega_; }

 private:
  double omega_;
  double x_ = 0.0;
  double x_dot_ = 0.0;
  double input_ = 0.0;
  bool primed_ = false;
};

/// sgn(e) |e|^(p/q). Requires 0 < p < q.
double tpow(double e, int p, int q);

/// d tpow / de with |e| floored at e_sing: (p/q) max(|e|, e_sing)^(p/q - 1).
double tpow_slope(double e, int p, int q, double e_sing);

/// sat(S / width) when width > 0, otherwise sgn(S) with sgn(0) = 0.
double switching_term(double S, double width);

double surface_s1(const HtsmcGains& g, double e_r, double e_r_dot);
double surface_s2(const HtsmcGains& g, double e_beta, double e_beta_dot);
double surface_total(const HtsmcGains& g, double S1, double S2);

struct SurfaceValues {
  double tau = 0.0;
  double S1 = 0.0;
  double S2 = 0.0;
  double S = 0.0;
};

/// Roll torque that makes the second-layer surface obey the reaching law.
/// Throws DegenerateGainError when |A b2 + B b1| <= 1e-9.
SurfaceValues htsmc_torque(const HtsmcGains& g, const RollStateSpaceTerms& terms,
                           const RollState& roll, const RefSignal& q_ref, const RefSignal& beta_ref);

/// Expanded dS/dt for given roll accelerations, using the same guarded
/// terminal slope as htsmc_torque.
double htsmc_surface_rate(const HtsmcGains& g, const RollState& roll, double beta_ddot,
                          double q_r_ddot, const RefSignal& q_ref, const RefSignal& beta_ref);

/// Pitch torque from the velocity surfaces; alpha_d = 0.
/// Throws DegenerateGainError when |A_v b2 + B_v b1| <= 1e-9.
SurfaceValues hsmc_torque(const HsmcGains& g, const PitchStateSpaceTerms& terms,
                          const PitchState& pitch, const RefSignal& v_ref, double travel_error);

struct PidState {
  double integral = 0.0;
  double prev_measurement = 0.0;
  bool primed = false;
};

/// Clamped-integral PID with derivative on measurement.
double pid_step(const PidGains& g, double error, double measurement, double dt, PidState& state);

inline double lyapunov_value(double S) noexcept { return 0.5 * S * S; }
inline double lyapunov_rate(double S, double S_dot) noexcept { return S * S_dot; }

// ---------------------------------------------------------------------------

/// HTSMC roll controller. beta_d is evaluated at the commanded roll angle
/// and the measured velocity; q_rd and beta_d pass through command filters
/// which supply their first and second derivatives.
class HtsmcController final : public DirectionController {
 public:
  HtsmcController(const ModelParams& params, const HtsmcGains& gains, double filter_omega);

  DirectionOutput compute(const SimState& measured, const Command& command, double dt) override;
  double surface_rate(const SimState& measured, const SimStateRate& rate) const override;

  /// Number of control steps at which the beta_d arcsin argument saturated.
  int saturation_count() const noexcept { return saturations_; }

 private:
  ModelParams params_;
  HtsmcGains gains_;
  CommandFilter q_filter_;
  CommandFilter beta_filter_;
  RefSignal last_q_ref_;
  RefSignal last_beta_ref_;
  int saturations_ = 0;
};

/// Baseline roll controller acting on the raw command.
class PidDirectionController final : public DirectionController {
 public:
  explicit PidDirectionController(const PidGains& gains);

  DirectionOutput compute(const SimState& measured, const Command& command, double dt) override;

 private:
  PidGains gains_;
  PidState state_;
};

class HsmcController final : public VelocityController {
 public:
  HsmcController(const ModelParams& params, const HsmcGains& gains, double filter_omega);

  double compute(const SimState& measured, const Command& command, double dt) override;

 private:
  ModelParams params_;
  HsmcGains gains_;
  CommandFilter v_filter_;
  double travel_error_ = 0.0;
};

}  // namespace spherebot
