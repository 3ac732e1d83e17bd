#include "spherebot/mpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "spherebot/errors.hpp"
#include "spherebot/qp.hpp"

namespace spherebot {

namespace {

void require_interval(const Interval& b, const char* what) {
  if (!(b.lo <= b.hi)) {
    throw ConfigError(std::string("MPC bound interval for ") + what + " is empty");
  }
}

PlanarPose add(const PlanarPose& a, const KinematicRate& k, double h) {
  return {a.X + h * k.X_dot, a.Y + h * k.Y_dot, a.phi + h * k.phi_dot};
}

}  // namespace

void MpcConfig::validate() const {
  if (N < 1) {
    throw ConfigError("MPC horizon N must be >= 1");
  }
  if (!(dt > 0.0)) {
    throw ConfigError("MPC dt must be positive");
  }
  for (double q : Q) {
    if (!(q >= 0.0)) {
      throw ConfigError("MPC state weights must be non-negative");
    }
  }
  for (double r : Rw) {
    if (!(r >= 0.0)) {
      throw ConfigError("MPC input weights must be non-negative");
    }
  }
  require_interval(x_bounds[0], "X");
  require_interval(x_bounds[1], "Y");
  require_interval(x_bounds[2], "phi");
  require_interval(u_bounds[0], "v");
  require_interval(u_bounds[1], "q_r");
  if (!(u_bounds[1].lo > -std::numbers::pi / 2.0 && u_bounds[1].hi < std::numbers::pi / 2.0)) {
    throw ConfigError("MPC q_r bounds must lie inside (-pi/2, pi/2)");
  }
  if (max_sqp_iters < 1 || !(kkt_tol > 0.0) || !(qp_reg >= 0.0)) {
    throw ConfigError("MPC needs max_sqp_iters >= 1, kkt_tol > 0, qp_reg >= 0");
  }
}

PlanarPose shoot(const PlanarPose& pose, const Command& u, double dt, double R) {
  const KinematicRate k1 = kinematic_derivative(pose, u.v, u.q_r, R);
  const KinematicRate k2 = kinematic_derivative(add(pose, k1, 0.5 * dt), u.v, u.q_r, R);
  const KinematicRate k3 = kinematic_derivative(add(pose, k2, 0.5 * dt), u.v, u.q_r, R);
  const KinematicRate k4 = kinematic_derivative(add(pose, k3, dt), u.v, u.q_r, R);
  PlanarPose out;
  out.X = pose.X + dt / 6.0 * (k1.X_dot + 2.0 * k2.X_dot + 2.0 * k3.X_dot + k4.X_dot);
  out.Y = pose.Y + dt / 6.0 * (k1.Y_dot + 2.0 * k2.Y_dot + 2.0 * k3.Y_dot + k4.Y_dot);
  out.phi = wrap_angle(pose.phi +
                       dt / 6.0 * (k1.phi_dot + 2.0 * k2.phi_dot + 2.0 * k3.phi_dot + k4.phi_dot));
  return out;
}

// phi_dot is constant over the step, so the stages sit at phi, phi + h w/2
// (twice) and phi + h w:
//   dX = h v / 6 (cos a0 + 4 cos a1 + cos a2), dY likewise with sin.
ShootJacobian shoot_jacobian(const PlanarPose& pose, const Command& u, double dt, double R) {
  // Domain check shared with shoot().
  (void)kinematic_derivative(pose, u.v, u.q_r, R);
  const double h = dt;
  const double tq = std::tan(u.q_r);
  const double w = u.v * tq / R;
  const double a0 = pose.phi;
  const double a1 = a0 + 0.5 * h * w;
  const double a2 = a0 + h * w;
  const double c0 = std::cos(a0), c1 = std::cos(a1), c2 = std::cos(a2);
  const double s0 = std::sin(a0), s1 = std::sin(a1), s2 = std::sin(a2);
  const double C = c0 + 4.0 * c1 + c2;
  const double S = s0 + 4.0 * s1 + s2;
  const double k = h * u.v / 6.0;
  const double dX = k * C;
  const double dY = k * S;
  const double dX_dw = -k * h * (2.0 * s1 + s2);
  const double dY_dw = k * h * (2.0 * c1 + c2);
  const double dw_dv = tq / R;
  const double dw_dq = u.v * (1.0 + tq * tq) / R;

  ShootJacobian J;
  J.A << 1.0, 0.0, -dY,
         0.0, 1.0, dX,
         0.0, 0.0, 1.0;
  J.B << h / 6.0 * C + dX_dw * dw_dv, dX_dw * dw_dq,
         h / 6.0 * S + dY_dw * dw_dv, dY_dw * dw_dq,
         h * dw_dv, h * dw_dq;
  return J;
}

// ---------------------------------------------------------------------------
// NlpInstance

Command NlpInstance::input(const Eigen::VectorXd& z, int i) const {
  const int o = input_offset(i);
  return {z(o), z(o + 1)};
}

PlanarPose NlpInstance::state(const Eigen::VectorXd& z, int i) const {
  if (i == 0) {
    return anchor;
  }
  const int o = state_offset(i);
  return {z(o), z(o + 1), z(o + 2)};
}

double NlpInstance::objective(const Eigen::VectorXd& z) const {
  double f = 0.0;
  for (int i = 0; i < N; ++i) {
    const Command u = input(z, i);
    const double ev = u.v - u_ref[i].v;
    const double eq = u.q_r - u_ref[i].q_r;
    f += Rw[0] * ev * ev + Rw[1] * eq * eq;
    const PlanarPose x = state(z, i + 1);
    const PlanarPose& r = x_ref[i];
    const double ex = x.X - r.X;
    const double ey = x.Y - r.Y;
    const double ep = wrap_angle(x.phi - r.phi);
    f += Q[0] * ex * ex + Q[1] * ey * ey + Q[2] * ep * ep;
  }
  return f;
}

Eigen::VectorXd NlpInstance::gradient(const Eigen::VectorXd& z) const {
  Eigen::VectorXd g(num_variables());
  for (int i = 0; i < N; ++i) {
    const int ou = input_offset(i);
    g(ou) = 2.0 * Rw[0] * (z(ou) - u_ref[i].v);
    g(ou + 1) = 2.0 * Rw[1] * (z(ou + 1) - u_ref[i].q_r);
    const int ox = state_offset(i + 1);
    const PlanarPose& r = x_ref[i];
    g(ox) = 2.0 * Q[0] * (z(ox) - r.X);
    g(ox + 1) = 2.0 * Q[1] * (z(ox + 1) - r.Y);
    g(ox + 2) = 2.0 * Q[2] * wrap_angle(z(ox + 2) - r.phi);
  }
  return g;
}

Eigen::VectorXd NlpInstance::hessian_diagonal() const {
  Eigen::VectorXd h(num_variables());
  for (int i = 0; i < N; ++i) {
    const int o = input_offset(i);
    h.segment<5>(o) << 2.0 * Rw[0], 2.0 * Rw[1], 2.0 * Q[0], 2.0 * Q[1], 2.0 * Q[2];
  }
  return h;
}

Eigen::VectorXd NlpInstance::defects(const Eigen::VectorXd& z) const {
  Eigen::VectorXd c(num_defects());
  for (int i = 0; i < N; ++i) {
    const PlanarPose next = shoot(state(z, i), input(z, i), dt, R);
    const PlanarPose x = state(z, i + 1);
    c(3 * i) = x.X - next.X;
    c(3 * i + 1) = x.Y - next.Y;
    c(3 * i + 2) = wrap_angle(x.phi - next.phi);
  }
  return c;
}

Eigen::MatrixXd NlpInstance::defect_jacobian(const Eigen::VectorXd& z) const {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(num_defects(), num_variables());
  for (int i = 0; i < N; ++i) {
    const ShootJacobian sj = shoot_jacobian(state(z, i), input(z, i), dt, R);
    J.block<3, 3>(3 * i, state_offset(i + 1)) = Eigen::Matrix3d::Identity();
    J.block<3, 2>(3 * i, input_offset(i)) = -sj.B;
    if (i > 0) {
      J.block<3, 3>(3 * i, state_offset(i)) = -sj.A;
    }
  }
  return J;
}

Eigen::VectorXd NlpInstance::pack(const std::vector<Command>& U,
                                  const std::vector<PlanarPose>& X) const {
  if (static_cast<int>(U.size()) != N || static_cast<int>(X.size()) != N) {
    throw ConfigError("decision sequences must have N entries");
  }
  Eigen::VectorXd z(num_variables());
  for (int i = 0; i < N; ++i) {
    z.segment<5>(input_offset(i)) << U[i].v, U[i].q_r, X[i].X, X[i].Y, X[i].phi;
  }
  return z;
}

Eigen::VectorXd NlpInstance::reference_rollout() const {
  Eigen::VectorXd z(num_variables());
  PlanarPose x = anchor;
  for (int i = 0; i < N; ++i) {
    const int o = input_offset(i);
    const Command u{std::clamp(u_ref[i].v, lower(o), upper(o)),
                    std::clamp(u_ref[i].q_r, lower(o + 1), upper(o + 1))};
    x = shoot(x, u, dt, R);
    z.segment<5>(o) << u.v, u.q_r, x.X, x.Y, x.phi;
  }
  return z;
}

NlpInstance build_problem(const MpcConfig& config, const TrajectoryRef& ref,
                          const PlanarPose& anchor, const Command& current_input, double t_now) {
  config.validate();
  const double a[3] = {anchor.X, anchor.Y, anchor.phi};
  static constexpr const char* kNames[3] = {"X", "Y", "phi"};
  for (int j = 0; j < 3; ++j) {
    if (!config.x_bounds[j].contains(a[j])) {
      throw InfeasibleAnchorError("anchor " + std::string(kNames[j]) + " = " + std::to_string(a[j]) +
                                  " violates its state bound");
    }
  }

  NlpInstance nlp;
  nlp.N = config.N;
  nlp.dt = config.dt;
  nlp.R = ref.radius();
  nlp.anchor = {anchor.X, anchor.Y, wrap_angle(anchor.phi)};
  nlp.current_input = current_input;
  nlp.Q = config.Q;
  nlp.Rw = config.Rw;
  nlp.lower.resize(nlp.num_variables());
  nlp.upper.resize(nlp.num_variables());
  for (int i = 0; i < config.N; ++i) {
    nlp.x_ref.push_back(ref.at(t_now + (i + 1) * config.dt).pose);
    nlp.u_ref.push_back(ref.at(t_now + (i + 0.5) * config.dt).input);
    const int o = NlpInstance::input_offset(i);
    nlp.lower.segment<5>(o) << config.u_bounds[0].lo, config.u_bounds[1].lo,
        config.x_bounds[0].lo, config.x_bounds[1].lo, config.x_bounds[2].lo;
    nlp.upper.segment<5>(o) << config.u_bounds[0].hi, config.u_bounds[1].hi,
        config.x_bounds[0].hi, config.x_bounds[1].hi, config.x_bounds[2].hi;
  }
  return nlp;
}

// ---------------------------------------------------------------------------
// SQP

std::string to_string(SqpStatus status) {
  switch (status) {
    case SqpStatus::kConverged:
      return "converged";
    case SqpStatus::kMaxIterations:
      return "max-iterations";
    case SqpStatus::kLineSearchFailed:
      return "line-search-failed";
  }
  return "unknown";
}

namespace {

void wrap_states(const NlpInstance& nlp, Eigen::VectorXd& z) {
  for (int i = 1; i <= nlp.N; ++i) {
    const int o = NlpInstance::state_offset(i) + 2;
    z(o) = wrap_angle(z(o));
  }
}

double kkt_residual(const NlpInstance& nlp, const Eigen::VectorXd& z, const Eigen::VectorXd& lambda,
                    const Eigen::VectorXd& nu) {
  const Eigen::VectorXd stationarity =
      nlp.gradient(z) - nlp.defect_jacobian(z).transpose() * lambda - nu;
  return std::max(stationarity.lpNorm<Eigen::Infinity>(),
                  nlp.defects(z).lpNorm<Eigen::Infinity>());
}

}  // namespace

SqpResult sqp_solve(const NlpInstance& nlp, const SqpOptions& options,
                    const std::optional<Eigen::VectorXd>& warm_start) {
  const int n = nlp.num_variables();
  Eigen::VectorXd z;
  if (warm_start) {
    if (warm_start->size() != n) {
      throw ConfigError("warm start has " + std::to_string(warm_start->size()) +
                        " entries, expected " + std::to_string(n));
    }
    z = warm_start->cwiseMax(nlp.lower).cwiseMin(nlp.upper);
    wrap_states(nlp, z);
  } else {
    z = nlp.reference_rollout();
  }

  const Eigen::VectorXd h_diag = nlp.hessian_diagonal().array() + options.qp_reg;
  QpProblem qp;
  qp.H = h_diag.asDiagonal();

  SqpResult res;
  res.lambda = Eigen::VectorXd::Zero(nlp.num_defects());
  res.nu = Eigen::VectorXd::Zero(n);
  double mu = 1.0;

  auto merit = [&](const Eigen::VectorXd& x) {
    return nlp.objective(x) + mu * nlp.defects(x).lpNorm<1>();
  };

  res.merit_history.push_back(merit(z));
  res.status = SqpStatus::kMaxIterations;

  for (int it = 1; it <= options.max_iters; ++it) {
    const Eigen::VectorXd grad = nlp.gradient(z);
    const Eigen::VectorXd c = nlp.defects(z);
    qp.g = grad;
    qp.A_eq = nlp.defect_jacobian(z);
    qp.b_eq = -c;
    qp.lower = nlp.lower - z;
    qp.upper = nlp.upper - z;
    const QpSolution sol = solve_qp(qp);
    res.iterations = it;
    res.lambda = sol.lambda_eq;
    res.nu = sol.nu;
    const Eigen::VectorXd& d = sol.x;

    const double lam_max = sol.lambda_eq.size() > 0 ? sol.lambda_eq.lpNorm<Eigen::Infinity>() : 0.0;
    if (mu < 1.1 * lam_max) {
      mu = 1.5 * lam_max + 1e-3;
      res.merit_history.back() = merit(z);
    }
    const double phi0 = merit(z);
    const double slope = grad.dot(d) - mu * c.lpNorm<1>();

    if (d.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + z.lpNorm<Eigen::Infinity>())) {
      res.kkt_residual = kkt_residual(nlp, z, res.lambda, res.nu);
      if (res.kkt_residual < options.kkt_tol) {
        res.status = SqpStatus::kConverged;
      } else {
        res.status = SqpStatus::kLineSearchFailed;
      }
      break;
    }

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial;
    for (int k = 0; k < 40; ++k) {
      trial = z + step * d;
      const double phi1 = merit(trial);
      if (std::isfinite(phi1) && phi1 <= phi0 + 1e-4 * step * std::min(slope, 0.0)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.kkt_residual = kkt_residual(nlp, z, res.lambda, res.nu);
      res.status = SqpStatus::kLineSearchFailed;
      break;
    }
    z = trial;
    wrap_states(nlp, z);
    res.merit_history.push_back(merit(z));

    res.kkt_residual = kkt_residual(nlp, z, res.lambda, res.nu);
    if (res.kkt_residual < options.kkt_tol) {
      res.status = SqpStatus::kConverged;
      break;
    }
  }

  res.z = z;
  res.objective = nlp.objective(z);
  for (int i = 0; i < nlp.N; ++i) {
    res.U.push_back(nlp.input(z, i));
    res.X.push_back(nlp.state(z, i + 1));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Planner

MpcPlanner::MpcPlanner(MpcConfig config, TrajectoryRef ref)
    : config_(std::move(config)), ref_(std::move(ref)) {
  config_.validate();
}

void MpcPlanner::reset() {
  previous_ = {};
  warm_.reset();
}

PlanResult MpcPlanner::plan_step(const PlanarPose& measured, double t_now) {
  const auto start = std::chrono::steady_clock::now();
  PlanResult out;
  try {
    const NlpInstance nlp = build_problem(config_, ref_, measured, previous_, t_now);
    const SqpResult res =
        sqp_solve(nlp, {config_.max_sqp_iters, config_.kkt_tol, config_.qp_reg}, warm_);
    out.stats.iterations = res.iterations;
    out.stats.kkt_residual = res.kkt_residual;
    out.stats.objective = res.objective;
    out.stats.flagged = res.flagged();
    if (res.status == SqpStatus::kLineSearchFailed) {
      out.command = previous_;
      warm_.reset();
    } else {
      out.command = res.U.front();
      // Shift one stage; the last input is repeated and its state re-shot.
      Eigen::VectorXd next = res.z;
      const int N = nlp.N;
      if (N > 1) {
        next.head(5 * (N - 1)) = res.z.tail(5 * (N - 1));
      }
      const int o = NlpInstance::input_offset(N - 1);
      const Command last = res.U.back();
      const PlanarPose x_last = shoot(res.X.back(), last, nlp.dt, nlp.R);
      next.segment<5>(o) << last.v, last.q_r, x_last.X, x_last.Y, x_last.phi;
      warm_ = next;
    }
  } catch (const Error&) {
    out.command = previous_;
    out.stats.flagged = true;
    warm_.reset();
  }
  out.stats.solve_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  previous_ = out.command;
  return out;
}

CommandUpdate MpcCommandSource::update(double t, const SimState& measured) {
  const PlanResult r = planner_.plan_step(measured.pose, t);
  return {r.command, r.stats};
}

}  // namespace spherebot
