#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spherebot/model.hpp"
#include "spherebot/references.hpp"
#include "spherebot/simulator.hpp"

namespace spherebot {

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

struct MpcConfig {
  int N = 10;
  double dt = 0.1;
  std::array<double, 3> Q{2.0, 2.0, 1.0};  ///< X, Y, phi
  std::array<double, 2> Rw{1.0, 1.0};      ///< v, q_r
  std::array<Interval, 3> x_bounds{};
  std::array<Interval, 2> u_bounds{Interval{-1.0, 1.0},
                                   Interval{-0.17453292519943295, 0.17453292519943295}};
  int max_sqp_iters = 30;
  double kkt_tol = 1e-6;
  double qp_reg = 1e-8;

  void validate() const;
};

/// One RK4 step of the simplified kinematics with the command held.
PlanarPose shoot(const PlanarPose& pose, const Command& u, double dt, double R);

struct ShootJacobian {
  Eigen::Matrix3d A;              ///< d next / d pose
  Eigen::Matrix<double, 3, 2> B;  ///< d next / d (v, q_r)
};

ShootJacobian shoot_jacobian(const PlanarPose& pose, const Command& u, double dt, double R);

/// Multiple-shooting transcription over z = [u0, x1, u1, x2, ..., u_{N-1}, x_N].
/// States are penalized at stages 1..N, inputs at 0..N-1; input references
/// are sampled at interval midpoints.
class NlpInstance {
 public:
  int N = 0;
  double dt = 0.0;
  double R = 0.0;
  PlanarPose anchor;
  Command current_input;
  std::vector<PlanarPose> x_ref;  ///< stages 1..N
  std::vector<Command> u_ref;     ///< stages 0..N-1
  std::array<double, 3> Q{};
  std::array<double, 2> Rw{};
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int num_variables() const noexcept { return 5 * N; }
  int num_defects() const noexcept { return 3 * N; }
  static int input_offset(int i) noexcept { return 5 * i; }
  static int state_offset(int i) noexcept { return 5 * (i - 1) + 2; }

  Command input(const Eigen::VectorXd& z, int i) const;
  PlanarPose state(const Eigen::VectorXd& z, int i) const;  ///< i = 0 gives the anchor

  double objective(const Eigen::VectorXd& z) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const;
  Eigen::VectorXd hessian_diagonal() const;
  Eigen::VectorXd defects(const Eigen::VectorXd& z) const;
  Eigen::MatrixXd defect_jacobian(const Eigen::VectorXd& z) const;

  Eigen::VectorXd pack(const std::vector<Command>& U, const std::vector<PlanarPose>& X) const;
  /// Inputs clamped to their bounds rolled out from the anchor.
  Eigen::VectorXd reference_rollout() const;
};

/// Throws InfeasibleAnchorError when the anchor violates x_bounds.
NlpInstance build_problem(const MpcConfig& config, const TrajectoryRef& ref,
                          const PlanarPose& anchor, const Command& current_input, double t_now);

enum class SqpStatus { kConverged, kMaxIterations, kLineSearchFailed };

std::string to_string(SqpStatus status);

struct SqpResult {
  std::vector<Command> U;
  std::vector<PlanarPose> X;
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;  ///< defect multipliers
  Eigen::VectorXd nu;      ///< bound multipliers, >= 0 at lower, <= 0 at upper
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;  ///< QP solves
  SqpStatus status = SqpStatus::kMaxIterations;
  std::vector<double> merit_history;  ///< merit after each accepted step, first entry at start

  bool flagged() const noexcept { return status != SqpStatus::kConverged; }
};

struct SqpOptions {
  int max_iters = 30;
  double kkt_tol = 1e-6;
  double qp_reg = 1e-8;
};

/// Gauss-Newton SQP with an L1 merit line search. Throws QpError when a
/// subproblem is degenerate; other failures return the best iterate flagged.
SqpResult sqp_solve(const NlpInstance& nlp, const SqpOptions& options,
                    const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

struct PlanResult {
  Command command;
  SolverStats stats;
};

class MpcPlanner {
 public:
  MpcPlanner(MpcConfig config, TrajectoryRef ref);

  /// Solves at the measured pose and returns the first input. On solver
  /// failure the previous command is returned and the stats are flagged.
  PlanResult plan_step(const PlanarPose& measured, double t_now);

  const std::optional<Eigen::VectorXd>& warm_start() const noexcept { return warm_; }
  const MpcConfig& config() const noexcept { return config_; }
  const TrajectoryRef& reference() const noexcept { return ref_; }
  void reset();

 private:
  MpcConfig config_;
  TrajectoryRef ref_;
  Command previous_{};
  std::optional<Eigen::VectorXd> warm_;
};

class MpcCommandSource final : public CommandSource {
 public:
  explicit MpcCommandSource(MpcPlanner planner) : planner_(std::move(planner)) {}

  CommandUpdate update(double t, const SimState& measured) override;

  MpcPlanner& planner() noexcept { return planner_; }

 private:
  MpcPlanner planner_;
};

}  // namespace spherebot
