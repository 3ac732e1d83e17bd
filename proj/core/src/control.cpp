#include "spherebot/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spherebot/errors.hpp"

namespace spherebot {

namespace {

constexpr double kMinDenominator = 1e-9;

void check_exponents(int p, int q, const char* which) {
  if (!(p > 0 && p < q)) {
    throw ConfigError(std::string("terminal exponents ") + which + " must satisfy 0 < p < q");
  }
}

void require(bool ok, const char* message) {
  if (!ok) {
    throw ConfigError(message);
  }
}

}  // namespace

void HtsmcGains::validate() const {
  check_exponents(p1, q1, "p1/q1");
  check_exponents(p2, q2, "p2/q2");
  require(A > B && B > 0.0, "HTSMC layer weights must satisfy A > B > 0");
  require(k > 0.0 && eps > 0.0, "HTSMC reaching gains k and eps must be positive");
  require(e_sing > 0.0, "HTSMC singularity guard e_sing must be positive");
  require(bl_width >= 0.0, "HTSMC boundary layer width must be non-negative");
}

void HsmcGains::validate() const {
  require(A_v > 0.0 && B_v > 0.0, "HSMC layer weights must be positive");
  require(k_v > 0.0 && eps_v > 0.0, "HSMC reaching gains must be positive");
  require(lambda1 >= 0.0 && lambda2 >= 0.0, "HSMC surface slopes must be non-negative");
  require(bl_width >= 0.0, "HSMC boundary layer width must be non-negative");
}

void PidGains::validate() const {
  require(k_p >= 0.0 && k_i >= 0.0 && k_d >= 0.0, "PID gains must be non-negative");
  require(integral_clamp > 0.0 && output_clamp > 0.0, "PID clamps must be positive");
}

CommandFilter::CommandFilter(double omega) : omega_(omega) {
  if (!(omega > 0.0)) {
    throw ConfigError("command filter natural frequency must be positive");
  }
}

RefSignal CommandFilter::sample(double input) {
  if (!primed_) {
    x_ = input;
    x_dot_ = 0.0;
    primed_ = true;
  }
  input_ = input;
  const double accel = omega_ * omega_ * (input_ - x_) - 2.0 * omega_ * x_dot_;
  return {x_, x_dot_, accel};
}

void CommandFilter::advance(double dt) {
  // e = x - u obeys e'' + 2w e' + w^2 e = 0:
  //   e(t)  = (e0 + (e0' + w e0) t) exp(-w t)
  //   e'(t) = (e0' - w (e0' + w e0) t) exp(-w t)
  const double e0 = x_ - input_;
  const double c2 = x_dot_ + omega_ * e0;
  const double decay = std::exp(-omega_ * dt);
  x_ = input_ + (e0 + c2 * dt) * decay;
  x_dot_ = (x_dot_ - omega_ * c2 * dt) * decay;
}

double tpow(double e, int p, int q) {
  check_exponents(p, q, "p/q");
  if (e == 0.0) {
    return 0.0;
  }
  return std::copysign(std::pow(std::abs(e), static_cast<double>(p) / q), e);
}

double tpow_slope(double e, int p, int q, double e_sing) {
  check_exponents(p, q, "p/q");
  const double ratio = static_cast<double>(p) / q;
  return ratio * std::pow(std::max(std::abs(e), e_sing), ratio - 1.0);
}

double switching_term(double S, double width) {
  if (width > 0.0) {
    return std::clamp(S / width, -1.0, 1.0);
  }
  return static_cast<double>((S > 0.0) - (S < 0.0));
}

double surface_s1(const HtsmcGains& g, double e_r, double e_r_dot) {
  return e_r_dot + g.a1 * e_r + g.c1 * tpow(e_r, g.p1, g.q1);
}

double surface_s2(const HtsmcGains& g, double e_beta, double e_beta_dot) {
  return e_beta_dot + g.a2 * e_beta + g.c2 * tpow(e_beta, g.p2, g.q2);
}

double surface_total(const HtsmcGains& g, double S1, double S2) { return g.A * S1 + g.B * S2; }

SurfaceValues htsmc_torque(const HtsmcGains& g, const RollStateSpaceTerms& terms,
                           const RollState& roll, const RefSignal& q_ref,
                           const RefSignal& beta_ref) {
  const double den = g.A * terms.b2 + g.B * terms.b1;
  if (!(std::abs(den) > kMinDenominator)) {
    throw DegenerateGainError("HTSMC denominator A*b2 + B*b1 vanished");
  }
  const double e_r = roll.q_r - q_ref.value;
  const double de_r = roll.q_r_dot - q_ref.rate;
  const double e_b = roll.beta - beta_ref.value;
  const double de_b = roll.beta_dot - beta_ref.rate;

  SurfaceValues out;
  out.S1 = surface_s1(g, e_r, de_r);
  out.S2 = surface_s2(g, e_b, de_b);
  out.S = surface_total(g, out.S1, out.S2);

  const double feedback =
      g.A * (terms.f2 - q_ref.accel) + g.B * (terms.f1 - beta_ref.accel) + g.A * g.a1 * de_r +
      g.B * g.a2 * de_b + g.A * g.c1 * tpow_slope(e_r, g.p1, g.q1, g.e_sing) * de_r +
      g.B * g.c2 * tpow_slope(e_b, g.p2, g.q2, g.e_sing) * de_b;
  const double reaching = g.k * out.S + g.eps * switching_term(out.S, g.bl_width);
  out.tau = -(feedback + reaching) / den;
  return out;
}

double htsmc_surface_rate(const HtsmcGains& g, const RollState& roll, double beta_ddot,
                          double q_r_ddot, const RefSignal& q_ref, const RefSignal& beta_ref) {
  const double e_r = roll.q_r - q_ref.value;
  const double de_r = roll.q_r_dot - q_ref.rate;
  const double e_b = roll.beta - beta_ref.value;
  const double de_b = roll.beta_dot - beta_ref.rate;
  const double dS1 =
      (q_r_ddot - q_ref.accel) + g.a1 * de_r + g.c1 * tpow_slope(e_r, g.p1, g.q1, g.e_sing) * de_r;
  const double dS2 = (beta_ddot - beta_ref.accel) + g.a2 * de_b +
                     g.c2 * tpow_slope(e_b, g.p2, g.q2, g.e_sing) * de_b;
  return g.A * dS1 + g.B * dS2;
}

SurfaceValues hsmc_torque(const HsmcGains& g, const PitchStateSpaceTerms& terms,
                          const PitchState& pitch, const RefSignal& v_ref, double travel_error) {
  const double den = g.A_v * terms.b2 + g.B_v * terms.b1;
  if (!(std::abs(den) > kMinDenominator)) {
    throw DegenerateGainError("HSMC denominator A_v*b2 + B_v*b1 vanished");
  }
  const double e_v = pitch.x_dot - v_ref.value;
  SurfaceValues out;
  out.S1 = e_v + g.lambda1 * travel_error;
  out.S2 = pitch.alpha_dot + g.lambda2 * pitch.alpha;
  out.S = g.A_v * out.S1 + g.B_v * out.S2;

  const double feedback = g.A_v * (terms.f2 - v_ref.rate + g.lambda1 * e_v) +
                          g.B_v * (terms.f1 + g.lambda2 * pitch.alpha_dot);
  const double reaching = g.k_v * out.S + g.eps_v * switching_term(out.S, g.bl_width);
  out.tau = -(feedback + reaching) / den;
  return out;
}

double pid_step(const PidGains& g, double error, double measurement, double dt, PidState& state) {
  if (!(dt > 0.0)) {
    throw DomainError("pid_step requires dt > 0");
  }
  state.integral = std::clamp(state.integral + error * dt, -g.integral_clamp, g.integral_clamp);
  const double d_meas = state.primed ? (measurement - state.prev_measurement) / dt : 0.0;
  state.prev_measurement = measurement;
  state.primed = true;
  const double u = g.k_p * error + g.k_i * state.integral - g.k_d * d_meas;
  return std::clamp(u, -g.output_clamp, g.output_clamp);
}

// ---------------------------------------------------------------------------

HtsmcController::HtsmcController(const ModelParams& params, const HtsmcGains& gains,
                                 double filter_omega)
    : params_(params), gains_(gains), q_filter_(filter_omega), beta_filter_(filter_omega) {
  params_.validate();
  gains_.validate();
}

DirectionOutput HtsmcController::compute(const SimState& measured, const Command& command,
                                         double dt) {
  const BetaTarget target =
      beta_target(params_, measured.pitch.x_dot, command.q_r, measured.pitch.alpha);
  if (target.saturated) {
    ++saturations_;
  }
  last_q_ref_ = q_filter_.update(command.q_r, dt);
  last_beta_ref_ = beta_filter_.update(target.value, dt);

  const double F_fr = friction_estimate(params_, measured.pitch.x_dot, measured.roll.q_r);
  const RollStateSpaceTerms terms =
      roll_state_space(params_, measured.roll, F_fr, measured.pitch);
  const SurfaceValues s = htsmc_torque(gains_, terms, measured.roll, last_q_ref_, last_beta_ref_);
  return {s.tau, s.S1, s.S2, s.S, last_beta_ref_.value};
}

double HtsmcController::surface_rate(const SimState& measured, const SimStateRate& rate) const {
  return htsmc_surface_rate(gains_, measured.roll, rate.beta_ddot, rate.q_r_ddot, last_q_ref_,
                            last_beta_ref_);
}

PidDirectionController::PidDirectionController(const PidGains& gains) : gains_(gains) {
  gains_.validate();
}

DirectionOutput PidDirectionController::compute(const SimState& measured, const Command& command,
                                                double dt) {
  const double e = command.q_r - measured.roll.q_r;
  DirectionOutput out;
  out.tau = pid_step(gains_, e, measured.roll.q_r, dt, state_);
  return out;
}

HsmcController::HsmcController(const ModelParams& params, const HsmcGains& gains,
                               double filter_omega)
    : params_(params), gains_(gains), v_filter_(filter_omega) {
  params_.validate();
  gains_.validate();
}

double HsmcController::compute(const SimState& measured, const Command& command, double dt) {
  const RefSignal v_ref = v_filter_.update(command.v, dt);
  const PitchStateSpaceTerms terms =
      pitch_state_space(params_, measured.pitch, 0.0, measured.roll);
  const SurfaceValues s = hsmc_torque(gains_, terms, measured.pitch, v_ref, travel_error_);
  travel_error_ += (measured.pitch.x_dot - v_ref.value) * dt;
  return s.tau;
}

}  // namespace spherebot
