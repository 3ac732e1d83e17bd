#include "spherebot/qp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "spherebot/errors.hpp"

namespace spherebot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Constraint {
  Eigen::VectorXd normal;  // normal^T x >= offset, or == for equalities
  double offset = 0.0;
  bool equality = false;
  int bound_index = -1;
  bool upper = false;
};

class ActiveSet {
 public:
  ActiveSet(const Eigen::MatrixXd& J, const std::vector<Constraint>& cons)
      : J_(J), cons_(cons) {}

  /// Primal step z and dual step r for adding a constraint with normal n.
  void directions(const Eigen::VectorXd& n, Eigen::VectorXd& z, Eigen::VectorXd& r) const {
    const Eigen::Index dim = J_.rows();
    const auto q = static_cast<Eigen::Index>(active_.size());
    const Eigen::VectorXd Jt_n = J_.transpose() * n;
    if (q == 0) {
      z = J_ * Jt_n;
      r.resize(0);
      return;
    }
    Eigen::MatrixXd N(dim, q);
    for (Eigen::Index j = 0; j < q; ++j) {
      N.col(j) = cons_[active_[j]].normal;
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(J_.transpose() * N);
    const Eigen::MatrixXd Qf = qr.householderQ();
    const Eigen::VectorXd d = Qf.transpose() * Jt_n;
    z = (J_ * Qf.rightCols(dim - q)) * d.tail(dim - q);
    r = qr.matrixQR().topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(d.head(q));
  }

  void add(int index, double multiplier) {
    active_.push_back(index);
    u_.push_back(multiplier);
  }
  void drop(std::size_t position) {
    active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(position));
    u_.erase(u_.begin() + static_cast<std::ptrdiff_t>(position));
  }
  void dual_step(const Eigen::VectorXd& r, double t) {
    for (std::size_t j = 0; j < u_.size(); ++j) {
      u_[j] -= t * r(static_cast<Eigen::Index>(j));
    }
  }
  bool contains(int index) const {
    for (int a : active_) {
      if (a == index) {
        return true;
      }
    }
    return false;
  }
  std::size_t size() const { return active_.size(); }
  int index(std::size_t j) const { return active_[j]; }
  double multiplier(std::size_t j) const { return u_[j]; }

 private:
  const Eigen::MatrixXd& J_;
  const std::vector<Constraint>& cons_;
  std::vector<int> active_;
  std::vector<double> u_;
};

}  // namespace

QpSolution solve_qp(const QpProblem& pb, int max_iterations) {
  const Eigen::Index n = pb.H.rows();
  if (pb.H.cols() != n || pb.g.size() != n || pb.A_eq.rows() != pb.b_eq.size() ||
      (pb.A_eq.rows() > 0 && pb.A_eq.cols() != n) || pb.lower.size() != n ||
      pb.upper.size() != n) {
    throw QpError("QP dimensions are inconsistent");
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(pb.H);
  if (llt.info() != Eigen::Success) {
    throw QpError("QP Hessian is not positive definite after regularization");
  }
  // G^{-1} = J J^T with J = L^{-T}.
  const Eigen::MatrixXd L_inv =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd J = L_inv.transpose();

  std::vector<Constraint> cons;
  for (Eigen::Index i = 0; i < pb.A_eq.rows(); ++i) {
    cons.push_back({pb.A_eq.row(i).transpose(), pb.b_eq(i), true, -1, false});
  }
  const auto num_eq = cons.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pb.lower(i) > pb.upper(i)) {
      throw QpError("QP bound interval is empty");
    }
    if (std::isfinite(pb.lower(i))) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(i) = 1.0;
      cons.push_back({e, pb.lower(i), false, static_cast<int>(i), false});
    }
    if (std::isfinite(pb.upper(i))) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(i) = -1.0;
      cons.push_back({e, -pb.upper(i), false, static_cast<int>(i), true});
    }
  }
  if (max_iterations <= 0) {
    max_iterations = 50 * static_cast<int>(n + static_cast<Eigen::Index>(cons.size()) + 1);
  }

  const double scale = 1.0 + pb.g.lpNorm<Eigen::Infinity>();
  const double feas_tol = 1e-10 * scale;
  const double zero_tol = 1e-13;

  Eigen::VectorXd x = llt.solve(-pb.g);
  ActiveSet active(J, cons);
  Eigen::VectorXd z;
  Eigen::VectorXd r;
  int iterations = 0;

  auto slack = [&](int j) { return cons[j].normal.dot(x) - cons[j].offset; };

  for (std::size_t j = 0; j < num_eq; ++j) {
    const int idx = static_cast<int>(j);
    active.directions(cons[j].normal, z, r);
    const double s = slack(idx);
    const double zn = z.dot(cons[j].normal);
    if (z.norm() <= zero_tol * (1.0 + cons[j].normal.norm()) || std::abs(zn) <= zero_tol) {
      if (std::abs(s) <= feas_tol * (1.0 + std::abs(cons[j].offset))) {
        continue;  // redundant row
      }
      throw QpError("QP equality constraints are inconsistent");
    }
    const double t = -s / zn;
    x += t * z;
    active.dual_step(r, t);
    active.add(idx, t);
  }

  while (true) {
    int worst = -1;
    double worst_slack = -feas_tol;
    for (std::size_t j = num_eq; j < cons.size(); ++j) {
      const int idx = static_cast<int>(j);
      if (active.contains(idx)) {
        continue;
      }
      const double s = slack(idx);
      if (s < worst_slack) {
        worst_slack = s;
        worst = idx;
      }
    }
    if (worst < 0) {
      break;
    }
    if (++iterations > max_iterations) {
      throw QpError("QP active-set iteration limit reached");
    }

    const Eigen::VectorXd& np = cons[worst].normal;
    double u_new = 0.0;
    while (true) {
      active.directions(np, z, r);

      double t_partial = kInf;
      std::size_t drop_at = 0;
      for (std::size_t j = 0; j < active.size(); ++j) {
        if (cons[active.index(j)].equality) {
          continue;
        }
        const double rj = r(static_cast<Eigen::Index>(j));
        if (rj > zero_tol) {
          const double ratio = active.multiplier(j) / rj;
          if (ratio < t_partial) {
            t_partial = ratio;
            drop_at = j;
          }
        }
      }
      const double zn = z.dot(np);
      const double t_full =
          (z.norm() > zero_tol && zn > zero_tol) ? -slack(worst) / zn : kInf;

      if (!std::isfinite(t_partial) && !std::isfinite(t_full)) {
        throw QpError("QP is infeasible");
      }
      if (!std::isfinite(t_full)) {
        active.dual_step(r, t_partial);
        u_new += t_partial;
        active.drop(drop_at);
        continue;
      }
      const double t = std::min(t_partial, t_full);
      x += t * z;
      active.dual_step(r, t);
      u_new += t;
      if (t_full <= t_partial) {
        active.add(worst, u_new);
        break;
      }
      active.drop(drop_at);
    }
  }

  QpSolution sol;
  sol.x = x;
  sol.iterations = iterations;
  sol.lambda_eq = Eigen::VectorXd::Zero(pb.A_eq.rows());
  sol.nu = Eigen::VectorXd::Zero(n);
  for (std::size_t j = 0; j < active.size(); ++j) {
    const Constraint& c = cons[active.index(j)];
    if (c.equality) {
      sol.lambda_eq(active.index(j)) = active.multiplier(j);
    } else if (c.upper) {
      sol.nu(c.bound_index) -= active.multiplier(j);
    } else {
      sol.nu(c.bound_index) += active.multiplier(j);
    }
  }
  return sol;
}

}  // namespace spherebot
