#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spherebot/control.hpp"
#include "spherebot/errors.hpp"
#include "support.hpp"

namespace spherebot {
namespace {

using testing::nominal_params;
using testing::uniform;

HtsmcGains sample_gains() {
  HtsmcGains g;
  g.a1 = 2.0;
  g.c1 = 1.0;
  g.p1 = 1;
  g.q1 = 3;
  g.a2 = 2.0;
  g.c2 = 1.0;
  g.p2 = 1;
  g.q2 = 3;
  g.A = 2.0;
  g.B = 1.0;
  g.k = 3.0;
  g.eps = 0.5;
  return g;
}

HtsmcGains random_gains(std::mt19937_64& rng) {
  HtsmcGains g;
  g.a1 = uniform(rng, 0.5, 50);
  g.c1 = uniform(rng, 0.0, 10);
  g.q1 = 3 + static_cast<int>(uniform(rng, 0, 5));
  g.p1 = 1 + static_cast<int>(uniform(rng, 0, g.q1 - 1));
  g.a2 = uniform(rng, 0.5, 100);
  g.c2 = uniform(rng, 0.0, 10);
  g.q2 = 3 + static_cast<int>(uniform(rng, 0, 5));
  g.p2 = 1 + static_cast<int>(uniform(rng, 0, g.q2 - 1));
  g.B = uniform(rng, 0.1, 5);
  g.A = g.B + uniform(rng, 0.1, 400);
  g.k = uniform(rng, 0.1, 60);
  g.eps = uniform(rng, 0.01, 1);
  g.e_sing = 1e-3;
  g.bl_width = uniform(rng, 0, 1) < 0.5 ? 0.0 : uniform(rng, 0.01, 0.5);
  return g;
}

TEST(Control, TpowExamples) {
  EXPECT_EQ(tpow(0.0, 3, 5), 0.0);
  EXPECT_EQ(tpow(1.0, 3, 5), 1.0);
  EXPECT_NEAR(tpow(-8.0, 1, 3), -2.0, 1e-14);
  EXPECT_EQ(tpow(-0.3, 3, 5), -tpow(0.3, 3, 5));
  EXPECT_THROW(tpow(1.0, 5, 3), ConfigError);
}

TEST(Control, TpowSlopeIsGuardedDerivative) {
  EXPECT_NEAR(tpow_slope(8.0, 1, 3, 1e-3), (1.0 / 3.0) * std::pow(8.0, -2.0 / 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(tpow_slope(0.0, 1, 3, 1e-3), tpow_slope(1e-3, 1, 3, 1e-3));
  const double h = 1e-7;
  const double fd = (tpow(0.4 + h, 3, 5) - tpow(0.4 - h, 3, 5)) / (2 * h);
  EXPECT_NEAR(tpow_slope(0.4, 3, 5, 1e-3), fd, 1e-7);
}

TEST(Control, SwitchingTerm) {
  EXPECT_EQ(switching_term(0.0, 0.0), 0.0);
  EXPECT_EQ(switching_term(-2.0, 0.0), -1.0);
  EXPECT_EQ(switching_term(3.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(switching_term(0.05, 0.1), 0.5);
  EXPECT_EQ(switching_term(-5.0, 0.1), -1.0);
}

TEST(Control, SurfaceExamples) {
  const HtsmcGains g = sample_gains();
  EXPECT_EQ(surface_s1(g, 0.0, 0.0), 0.0);
  EXPECT_NEAR(surface_s1(g, 1.0, 0.0), 3.0, 1e-15);
  EXPECT_EQ(surface_s1(g, -0.3, -0.7), -surface_s1(g, 0.3, 0.7));
  EXPECT_EQ(surface_s2(g, 0.0, 0.0), 0.0);
  EXPECT_NEAR(surface_s2(g, 1.0, 0.0), 3.0, 1e-15);
  EXPECT_EQ(surface_s2(g, -0.3, -0.7), -surface_s2(g, 0.3, 0.7));
  EXPECT_EQ(surface_total(g, 0.0, 0.0), 0.0);
  EXPECT_EQ(surface_total(g, 1.0, 0.0), g.A);
  EXPECT_EQ(surface_total(g, 1.0, -1.0), 1.0);
}

TEST(Control, GainValidation) {
  HtsmcGains g = sample_gains();
  EXPECT_NO_THROW(g.validate());
  g.B = 3.0;
  EXPECT_THROW(g.validate(), ConfigError);
  g = sample_gains();
  g.p1 = 3;
  EXPECT_THROW(g.validate(), ConfigError);
  g = sample_gains();
  g.eps = 0.0;
  EXPECT_THROW(g.validate(), ConfigError);
}

TEST(Control, HtsmcEquilibriumGivesZeroTorque) {
  const RollStateSpaceTerms terms{0.0, 0.0, 2.0, 5.0};
  const SurfaceValues s = htsmc_torque(sample_gains(), terms, {}, {}, {});
  EXPECT_EQ(s.tau, 0.0);
  EXPECT_EQ(s.S, 0.0);
}

TEST(Control, HtsmcReachingLawIdentity) {
  const ModelParams p = nominal_params();
  std::mt19937_64 rng(1234);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const HtsmcGains g = random_gains(rng);
    const RollState roll{uniform(rng, -0.8, 0.8), uniform(rng, -0.4, 0.4), uniform(rng, -3, 3),
                         uniform(rng, -3, 3)};
    const PitchState pitch{uniform(rng, -0.5, 0.5), 0.0, uniform(rng, -1, 1), uniform(rng, -1.5, 1.5)};
    const RefSignal q_ref{uniform(rng, -0.4, 0.4), uniform(rng, -1, 1), uniform(rng, -10, 10)};
    const RefSignal b_ref{uniform(rng, -0.4, 0.4), uniform(rng, -1, 1), uniform(rng, -10, 10)};
    const double F = friction_estimate(p, pitch.x_dot, roll.q_r);
    const RollStateSpaceTerms t = roll_state_space(p, roll, F, pitch);
    const SurfaceValues s = htsmc_torque(g, t, roll, q_ref, b_ref);
    const double beta_ddot = t.f1 + t.b1 * s.tau;
    const double q_ddot = t.f2 + t.b2 * s.tau;
    const double S_dot = htsmc_surface_rate(g, roll, beta_ddot, q_ddot, q_ref, b_ref);
    const double target = -g.k * s.S - g.eps * switching_term(s.S, g.bl_width);
    worst = std::max(worst, std::abs(S_dot - target) / std::max(1.0, std::abs(target)));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Control, HtsmcPureReaching) {
  HtsmcGains g = sample_gains();
  const RollStateSpaceTerms terms{0.0, 0.0, 2.0, 5.0};
  const double S = 0.8;
  // S1 = q_r_dot alone with all position errors zero.
  RollState roll;
  roll.q_r_dot = S / g.A;
  const SurfaceValues s = htsmc_torque(g, terms, roll, {}, {});
  EXPECT_NEAR(s.S, S, 1e-15);
  const double feedback = g.A * g.a1 * roll.q_r_dot + g.A * g.c1 * tpow_slope(0.0, 1, 3, g.e_sing) * roll.q_r_dot;
  EXPECT_NEAR(s.tau, -(feedback + g.k * S + g.eps) / (g.A * 5.0 + g.B * 2.0), 1e-12);
}

TEST(Control, HtsmcDegenerateDenominatorThrows) {
  const HtsmcGains g = sample_gains();
  const RollStateSpaceTerms terms{0.0, 0.0, 2.0, -1.0};
  EXPECT_THROW(htsmc_torque(g, terms, {}, {}, {}), DegenerateGainError);
}

TEST(Control, HtsmcTorqueContinuousAcrossZeroError) {
  const HtsmcGains g = sample_gains();
  const RollStateSpaceTerms terms{0.1, -0.2, 2.0, 5.0};
  auto jump = [&](double eps) {
    RollState a, b;
    a.q_r = eps;
    a.q_r_dot = 0.3;
    b.q_r = -eps;
    b.q_r_dot = 0.3;
    const double ta = htsmc_torque(g, terms, a, {}, {}).tau;
    const double tb = htsmc_torque(g, terms, b, {}, {}).tau;
    EXPECT_TRUE(std::isfinite(ta) && std::isfinite(tb));
    return std::abs(ta - tb);
  };
  const double j6 = jump(1e-6), j9 = jump(1e-9), j12 = jump(1e-12);
  EXPECT_LT(j9, j6);
  EXPECT_LT(j12, j9);
  EXPECT_LT(j12, 1e-3);
}

TEST(Control, HsmcEquilibriumAndSign) {
  const ModelParams p = nominal_params();
  HsmcGains g;
  g.lambda1 = 1.0;
  g.lambda2 = 5.0;
  g.A_v = 1.0;
  g.B_v = 0.2;
  g.k_v = 5.0;
  g.eps_v = 0.05;
  const PitchStateSpaceTerms rest = pitch_state_space(p, {}, 0.0);
  EXPECT_EQ(hsmc_torque(g, rest, {}, {}, 0.0).tau, 0.0);
  EXPECT_GT(hsmc_torque(g, rest, {}, {0.5, 0.0, 0.0}, 0.0).tau, 0.0);
}

TEST(Control, HsmcReachingLawIdentity) {
  const ModelParams p = nominal_params();
  std::mt19937_64 rng(77);
  for (int i = 0; i < 1000; ++i) {
    HsmcGains g;
    g.lambda1 = uniform(rng, 0, 5);
    g.lambda2 = uniform(rng, 0, 10);
    g.A_v = uniform(rng, 0.5, 2);
    g.B_v = uniform(rng, 0.1, 1);
    g.k_v = uniform(rng, 0.5, 20);
    g.eps_v = uniform(rng, 0.01, 0.5);
    g.bl_width = uniform(rng, 0, 0.2);
    const PitchState pitch{uniform(rng, -0.5, 0.5), 0.0, uniform(rng, -2, 2), uniform(rng, -1.5, 1.5)};
    const RefSignal v_ref{uniform(rng, -1, 1), uniform(rng, -2, 2), 0.0};
    const double e_x = uniform(rng, -1, 1);
    const PitchStateSpaceTerms t = pitch_state_space(p, pitch, 0.0);
    const SurfaceValues s = hsmc_torque(g, t, pitch, v_ref, e_x);
    const double alpha_ddot = t.f1 + t.b1 * s.tau;
    const double x_ddot = t.f2 + t.b2 * s.tau;
    const double e_v = pitch.x_dot - v_ref.value;
    const double dS = g.A_v * ((x_ddot - v_ref.rate) + g.lambda1 * e_v) +
                      g.B_v * (alpha_ddot + g.lambda2 * pitch.alpha_dot);
    const double target = -g.k_v * s.S - g.eps_v * switching_term(s.S, g.bl_width);
    EXPECT_NEAR(dS, target, 1e-9 * std::max(1.0, std::abs(target)));
  }
}

TEST(Control, PidExamples) {
  PidGains g;
  g.k_p = 2.0;
  g.k_i = 0.5;
  g.k_d = 0.1;
  g.integral_clamp = 10.0;
  g.output_clamp = 100.0;
  PidState zero;
  EXPECT_EQ(pid_step(g, 0.0, 0.0, 0.02, zero), 0.0);

  PidState st;
  double u = 0.0;
  const int n = 25;
  for (int i = 0; i < n; ++i) {
    u = pid_step(g, 0.1, 0.0, 0.02, st);
  }
  EXPECT_NEAR(u, 2.0 * 0.1 + 0.5 * 0.1 * n * 0.02, 1e-12);
}

TEST(Control, PidAntiWindupAndClamp) {
  PidGains g;
  g.k_p = 1.0;
  g.k_i = 1.0;
  g.integral_clamp = 0.2;
  g.output_clamp = 0.5;
  PidState st;
  for (int i = 0; i < 1000; ++i) {
    const double u = pid_step(g, 1.0, 0.0, 0.02, st);
    EXPECT_LE(std::abs(st.integral), 0.2);
    EXPECT_LE(std::abs(u), 0.5);
  }
  EXPECT_THROW(pid_step(g, 1.0, 0.0, 0.0, st), DomainError);
}

TEST(Control, PidDerivativeOnMeasurement) {
  PidGains g;
  g.k_d = 1.0;
  g.output_clamp = 100.0;
  PidState st;
  EXPECT_EQ(pid_step(g, 0.0, 0.0, 0.1, st), 0.0);
  EXPECT_NEAR(pid_step(g, 0.0, 0.2, 0.1, st), -2.0, 1e-12);
}

TEST(Control, Lyapunov) {
  EXPECT_EQ(lyapunov_value(0.0), 0.0);
  EXPECT_EQ(lyapunov_value(2.0), 2.0);
  EXPECT_EQ(lyapunov_rate(2.0, -3.0), -6.0);
}

TEST(Control, CommandFilterPrimesAtRest) {
  CommandFilter f(20.0);
  const RefSignal r = f.update(0.3, 0.02);
  EXPECT_EQ(r.value, 0.3);
  EXPECT_EQ(r.rate, 0.0);
  EXPECT_EQ(r.accel, 0.0);
}

TEST(Control, CommandFilterMatchesClosedFormStepResponse) {
  const double w = 20.0;
  CommandFilter f(w);
  f.update(0.0, 0.02);
  double t = 0.02;
  for (int i = 0; i < 20; ++i) {
    const RefSignal r = f.update(1.0, 0.02);
    const double tau = t - 0.02;
    EXPECT_NEAR(r.value, 1.0 - (1.0 + w * tau) * std::exp(-w * tau), 1e-12);
    EXPECT_NEAR(r.rate, w * w * tau * std::exp(-w * tau), 1e-10);
    t += 0.02;
  }
  for (int i = 0; i < 30; ++i) f.update(1.0, 0.02);
  EXPECT_NEAR(f.sample(1.0).value, 1.0, 1e-3);
  EXPECT_THROW(CommandFilter(0.0), ConfigError);
}

}  // namespace
}  // namespace spherebot
