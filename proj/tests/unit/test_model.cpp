#include <gtest/gtest.h>

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <random>

#include "spherebot/errors.hpp"
#include "spherebot/model.hpp"
#include "support.hpp"

namespace spherebot {
namespace {

using testing::nominal_params;
using testing::uniform;

constexpr double kPi = std::numbers::pi;

TEST(Model, ValidateRejectsBadParameters) {
  ModelParams p = nominal_params();
  EXPECT_NO_THROW(p.validate());
  p.m = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = nominal_params();
  p.l = 0.2;
  EXPECT_THROW(p.validate(), ConfigError);
  p = nominal_params();
  p.zeta = -1.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Model, WrapAngle) {
  EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
  EXPECT_NEAR(wrap_angle(-7.0), -7.0 + 2.0 * kPi, 1e-15);
}

TEST(Model, MassMatrixAtRestMatchesPrintedEntries) {
  const ModelParams p = nominal_params();
  const Eigen::Matrix4d mm = mass_matrix(p, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(mm(0, 0), 0.04);
  EXPECT_DOUBLE_EQ(mm(0, 1), 0.3);
  EXPECT_DOUBLE_EQ(mm(1, 0), 3.0 * 0.15 * 0.1);
  EXPECT_DOUBLE_EQ(mm(1, 1), 5.0 * 0.15 + 0.03 / 0.15);
  EXPECT_DOUBLE_EQ(mm(2, 2), 0.03);
  EXPECT_DOUBLE_EQ(mm(2, 3), 3.0 * 0.15 * 0.1);
  EXPECT_DOUBLE_EQ(mm(3, 2), 0.0);
  EXPECT_DOUBLE_EQ(mm(3, 3), 0.03 + 0.01 + 5.0 * 0.15 * 0.15);
}

TEST(Model, MassMatrixBlockStructure) {
  const ModelParams p = nominal_params();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const double a = uniform(rng, -kPi, kPi);
    const double b = uniform(rng, -kPi, kPi);
    const Eigen::Matrix4d mm = mass_matrix(p, a, b);
    EXPECT_EQ((mm.topRightCorner<2, 2>().norm()), 0.0);
    EXPECT_EQ((mm.bottomLeftCorner<2, 2>().norm()), 0.0);
    const RollState roll{b, 0.1, 0.2, 0.3};
    const PitchState pitch{a, 0.0, 0.4, 0.5};
    EXPECT_EQ(pitch_submodel(p, pitch, 0.0, roll).mass, (Eigen::Matrix2d(mm.topLeftCorner<2, 2>())));
    EXPECT_EQ(roll_submodel(p, roll, 0.0, pitch).mass,
              (Eigen::Matrix2d(mm.bottomRightCorner<2, 2>())));
  }
}

TEST(Model, NonlinearVectorAtRestIsZero) {
  const Eigen::Vector4d n = nonlinear_vector(nominal_params(), {}, {}, 0.0, 0.0);
  EXPECT_EQ(n.norm(), 0.0);
}

TEST(Model, NonlinearVectorGravityRow) {
  const ModelParams p = nominal_params();
  PitchState pitch;
  pitch.alpha = kPi / 2.0;
  const Eigen::Vector4d n = nonlinear_vector(p, pitch, {}, 0.0, 0.0);
  EXPECT_NEAR(n(0), p.m * p.g * p.l, 1e-12);
}

TEST(Model, NonlinearVectorTermByTerm) {
  const ModelParams p = nominal_params();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const PitchState pitch{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -2, 2),
                           uniform(rng, -2, 2)};
    const RollState roll{uniform(rng, -1, 1), uniform(rng, -0.5, 0.5), uniform(rng, -2, 2),
                         uniform(rng, -2, 2)};
    const double F_fp = uniform(rng, -3, 3);
    const double F_fr = uniform(rng, -3, 3);
    const Eigen::Vector4d n = nonlinear_vector(p, pitch, roll, F_fp, F_fr);

    const double m = 3.0, g = 9.81, l = 0.1, R = 0.15, z = 0.01;
    const double a = pitch.alpha, ad = pitch.alpha_dot, xd = pitch.x_dot;
    const double b = roll.beta, bd = roll.beta_dot, qd = roll.q_r_dot;
    EXPECT_NEAR(n(0), m * g * l * std::sin(a) * std::cos(b) + z * (ad + xd * std::cos(a) / R),
                1e-12);
    EXPECT_NEAR(n(1), -m * R * l * ad * ad * std::sin(a) + z * (ad * std::cos(a) + xd / R) + F_fp * R,
                1e-12);
    EXPECT_NEAR(n(2), m * g * l * std::cos(a) * std::sin(b) + z * (bd + qd * std::cos(b)), 1e-12);
    EXPECT_NEAR(n(3), -m * R * l * bd * bd * std::sin(b) + z * (qd + bd * std::cos(b)) + F_fr * R,
                1e-12);
  }
}

TEST(Model, SubmodelVectorsAreSlicesOfN) {
  const ModelParams p = nominal_params();
  const PitchState pitch{0.3, 1.0, -0.2, 0.6};
  const RollState roll{-0.1, 0.05, 0.7, -0.3};
  const Eigen::Vector4d n = nonlinear_vector(p, pitch, roll, 0.0, 0.0);
  EXPECT_EQ(pitch_submodel(p, pitch, 0.0, roll).nonlinear, (Eigen::Vector2d(n.head<2>())));
  EXPECT_EQ(roll_submodel(p, roll, 0.0, pitch).nonlinear, (Eigen::Vector2d(n.tail<2>())));
}

TEST(Model, RollStateSpaceAtRest) {
  const RollStateSpaceTerms t = roll_state_space(nominal_params(), {}, 0.0);
  EXPECT_EQ(t.f1, 0.0);
  EXPECT_EQ(t.f2, 0.0);
  EXPECT_NEAR(t.b2, 6.557377049180328, 1e-12);
}

TEST(Model, StateSpaceResidualIdentities) {
  const ModelParams p = nominal_params();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const RollState roll{uniform(rng, -1.2, 1.2), uniform(rng, -1.2, 1.2), uniform(rng, -3, 3),
                         uniform(rng, -3, 3)};
    const PitchState pitch{uniform(rng, -1.2, 1.2), 0.0, uniform(rng, -3, 3), uniform(rng, -2, 2)};
    const double F = uniform(rng, -5, 5);
    const Submodel sub = roll_submodel(p, roll, F, pitch);
    const RollStateSpaceTerms t = roll_state_space(p, roll, F, pitch);
    EXPECT_LT((sub.mass * Eigen::Vector2d(t.f1, t.f2) + sub.nonlinear).norm(), 1e-10);
    EXPECT_LT((sub.mass * Eigen::Vector2d(t.b1, t.b2) - Eigen::Vector2d::Ones()).norm(), 1e-10);

    const Submodel ps = pitch_submodel(p, pitch, F, roll);
    const PitchStateSpaceTerms pt = pitch_state_space(p, pitch, F, roll);
    EXPECT_LT((ps.mass * Eigen::Vector2d(pt.f1, pt.f2) + ps.nonlinear).norm(), 1e-10);
    EXPECT_LT((ps.mass * Eigen::Vector2d(pt.b1, pt.b2) - Eigen::Vector2d::Ones()).norm(), 1e-10);
  }
}

TEST(Model, SingularRollBlockThrows) {
  ModelParams p = nominal_params();
  p.I_mr = 1e-14;
  EXPECT_THROW(roll_state_space(p, {}, 0.0), SingularMatrixError);
}

TEST(Model, KinematicExamples) {
  const KinematicRate a = kinematic_derivative({0, 0, 0}, 1.0, 0.0, 0.15);
  EXPECT_DOUBLE_EQ(a.X_dot, 1.0);
  EXPECT_DOUBLE_EQ(a.Y_dot, 0.0);
  EXPECT_DOUBLE_EQ(a.phi_dot, 0.0);
  const KinematicRate b = kinematic_derivative({0, 0, kPi / 2}, 2.0, 0.0, 0.15);
  EXPECT_NEAR(b.X_dot, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(b.Y_dot, 2.0);
  const KinematicRate c = kinematic_derivative({0, 0, 0}, 0.5, kPi / 4, 0.15);
  EXPECT_NEAR(c.phi_dot, 0.5 / 0.15, 1e-12);
  EXPECT_THROW(kinematic_derivative({}, 1.0, kPi / 2, 0.15), DomainError);
}

TEST(Model, KinematicNormAndOddness) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const PlanarPose pose{0, 0, uniform(rng, -kPi, kPi)};
    const double v = uniform(rng, -2, 2);
    const double q = uniform(rng, -1.4, 1.4);
    const KinematicRate k = kinematic_derivative(pose, v, q, 0.15);
    EXPECT_NEAR(k.X_dot * k.X_dot + k.Y_dot * k.Y_dot, v * v, 1e-12);
    EXPECT_EQ(kinematic_derivative(pose, v, -q, 0.15).phi_dot, -k.phi_dot);
  }
}

TEST(Model, FullKinematicsRollRateTerm) {
  const KinematicRate k = full_kinematic_derivative({0, 0, 0}, 0.0, 0.0, 2.0, 0.15);
  EXPECT_NEAR(k.Y_dot, 0.3, 1e-15);
  EXPECT_NEAR(k.X_dot, 0.0, 1e-15);
}

TEST(Model, FrictionEstimate) {
  const ModelParams p = nominal_params();
  EXPECT_EQ(friction_estimate(p, 0.0, 0.3), 0.0);
  EXPECT_EQ(friction_estimate(p, 1.0, 0.0), 0.0);
  EXPECT_NEAR(friction_estimate(p, 0.5, 10.0 * kPi / 180.0), 1.469391505903875, 1e-12);
  EXPECT_EQ(friction_estimate(p, 0.7, -0.2), -friction_estimate(p, 0.7, 0.2));
  EXPECT_THROW(friction_estimate(p, 1.0, -kPi / 2), DomainError);
}

TEST(Model, BetaTarget) {
  const ModelParams p = nominal_params();
  EXPECT_EQ(beta_target(p, 0.0, 0.2, 0.0).value, 0.0);
  EXPECT_EQ(beta_target(p, 0.8, 0.0, 0.0).value, 0.0);
  const BetaTarget b = beta_target(p, 0.5, 10.0 * kPi / 180.0, 0.0);
  EXPECT_NEAR(b.value, 0.07496272141279532, 1e-12);
  EXPECT_FALSE(b.saturated);
  EXPECT_EQ(beta_target(p, 0.9, -0.3, 0.1).value, -beta_target(p, 0.9, 0.3, 0.1).value);
}

TEST(Model, BetaTargetSaturatesAndFlags) {
  const BetaTarget b = beta_target(nominal_params(), 3.0, 0.4, 0.0);
  EXPECT_TRUE(b.saturated);
  EXPECT_DOUBLE_EQ(b.value, kPi / 2);
}

TEST(Model, TotalEnergyExamples) {
  const ModelParams p = nominal_params();
  EXPECT_EQ(total_energy(p, {}, {}), 0.0);
  PitchState inverted;
  inverted.alpha = kPi;
  EXPECT_NEAR(total_energy(p, inverted, {}), 2.0 * p.m * p.g * p.l, 1e-12);
}

TEST(Model, TotalEnergyTermExpansion) {
  const ModelParams p = nominal_params();
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const PitchState pitch{uniform(rng, -1, 1), 0.0, uniform(rng, -2, 2), uniform(rng, -2, 2)};
    const RollState roll{uniform(rng, -1, 1), 0.0, uniform(rng, -2, 2), uniform(rng, -2, 2)};
    const double ca = std::cos(pitch.alpha), cb = std::cos(roll.beta);
    const double ad = pitch.alpha_dot, xd = pitch.x_dot;
    const double bd = roll.beta_dot, qd = roll.q_r_dot;
    const double pitch_cross = 0.5 * (3.0 * 0.1 * ca + 3.0 * 0.15 * 0.1 * ca);
    const double roll_cross = 0.5 * (3.0 * 0.15 * 0.1 * cb);
    const double kinetic = 0.5 * (0.04 * ad * ad + 2.0 * pitch_cross * ad * xd +
                                  (0.75 + 0.2) * xd * xd + 0.03 * bd * bd +
                                  2.0 * roll_cross * bd * qd + (0.04 + 5.0 * 0.0225) * qd * qd);
    const double potential = 3.0 * 9.81 * 0.1 * (1.0 - ca * cb);
    EXPECT_NEAR(total_energy(p, pitch, roll), kinetic + potential, 1e-12);
  }
}

}  // namespace
}  // namespace spherebot
