#pragma once

#include <Eigen/Core>

namespace spherebot {

/// Dense convex QP
///   min  1/2 x^T H x + g^T x
///   s.t. A_eq x = b_eq,  lower <= x <= upper
/// Infinite bounds are ignored.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// Multipliers satisfy H x + g = A_eq^T lambda_eq + nu, with nu_i >= 0 on an
/// active lower bound and nu_i <= 0 on an active upper bound.
struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda_eq;
  Eigen::VectorXd nu;
  int iterations = 0;
};

/// Goldfarb-Idnani dual active-set method. Starts from the unconstrained
/// minimizer, adds equalities, then repeatedly adds the most violated bound.
/// Throws QpError when H is not positive definite, the equalities are
/// inconsistent, or the problem is infeasible.
QpSolution solve_qp(const QpProblem& problem, int max_iterations = 0);

}  // namespace spherebot
