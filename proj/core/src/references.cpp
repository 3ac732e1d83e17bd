#include "spherebot/references.hpp"

#include <cmath>
#include <numbers>

#include "spherebot/errors.hpp"

namespace spherebot {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void require_nonnegative(double t) {
  if (!(t >= 0.0)) {
    throw DomainError("reference time must be non-negative, got " + std::to_string(t));
  }
}

PathSample line_path(double t) {
  return {0.5 * t, 2.0, 0.5, 0.0, 0.0, 0.0};
}

PathSample sine_path(double t) {
  const double w = 0.25;
  return {0.5 * t,
          2.0 * std::sin(w * t),
          0.5,
          2.0 * w * std::cos(w * t),
          0.0,
          -2.0 * w * w * std::sin(w * t)};
}

// (a sin u, a sin u cos u) with u = t/16, a = 8; Y = (a/2) sin 2u.
PathSample lemniscate_path(double t) {
  const double a = 8.0;
  const double w = 1.0 / 16.0;
  const double u = w * t;
  return {a * std::sin(u),
          0.5 * a * std::sin(2.0 * u),
          a * w * std::cos(u),
          a * w * std::cos(2.0 * u),
          -a * w * w * std::sin(u),
          -2.0 * a * w * w * std::sin(2.0 * u)};
}

}  // namespace

double roll_reference(std::string_view name, double t, const RollSchedule& schedule) {
  require_nonnegative(t);
  if (name == "step") {
    return t < schedule.step_time ? 0.0 : schedule.step_level;
  }
  if (name == "discrete") {
    if (schedule.levels.empty() || !(schedule.interval > 0.0)) {
      throw ConfigError("discrete roll schedule needs levels and a positive interval");
    }
    auto idx = static_cast<std::size_t>(std::floor(t / schedule.interval));
    if (idx >= schedule.levels.size()) {
      idx = schedule.levels.size() - 1;
    }
    return schedule.levels[idx];
  }
  if (name == "sine") {
    return t < 0.1 ? 0.0 : 10.0 * kDeg * std::sin(0.15 * t - 0.015);
  }
  throw ConfigError("unknown roll reference '" + std::string(name) + "'");
}

ReferencePoint reference_from_path(const PathSample& s, double R) {
  const double v2 = s.X_dot * s.X_dot + s.Y_dot * s.Y_dot;
  if (!(v2 > 1e-18)) {
    throw DomainError("reference path is stationary; heading undefined");
  }
  const double v = std::sqrt(v2);
  const double phi_dot = (s.X_dot * s.Y_ddot - s.Y_dot * s.X_ddot) / v2;
  ReferencePoint out;
  out.pose = {s.X, s.Y, wrap_angle(std::atan2(s.Y_dot, s.X_dot))};
  out.input = {v, std::atan(R * phi_dot / v)};
  return out;
}

TrajectoryRef::TrajectoryRef(std::string name, double t_end, double R, Path path)
    : name_(std::move(name)), t_end_(t_end), R_(R), path_(std::move(path)) {
  if (!(R_ > 0.0) || !(t_end_ >= 0.0) || !path_) {
    throw ConfigError("trajectory '" + name_ + "' needs R > 0, t_end >= 0 and a path");
  }
}

ReferencePoint TrajectoryRef::at(double t) const { return reference_from_path(path_(t), R_); }

ReferencePoint TrajectoryRef::checked(double t) const {
  if (!(t >= 0.0 && t <= t_end_)) {
    throw DomainError("t = " + std::to_string(t) + " outside trajectory '" + name_ + "' domain [0, " +
                      std::to_string(t_end_) + "]");
  }
  return at(t);
}

TrajectoryRef make_trajectory(std::string_view name, double R) {
  if (name == "line") {
    return {"line", 20.0, R, line_path};
  }
  if (name == "sine") {
    return {"sine", 12.0 * std::numbers::pi, R, sine_path};
  }
  if (name == "lemniscate") {
    return {"lemniscate", 32.0 * std::numbers::pi, R, lemniscate_path};
  }
  throw ConfigError("unknown trajectory '" + std::string(name) + "'");
}

ReferencePoint trajectory_reference(std::string_view name, double t, double R) {
  return make_trajectory(name, R).checked(t);
}

}  // namespace spherebot
