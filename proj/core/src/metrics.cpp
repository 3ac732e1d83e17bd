#include "spherebot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spherebot/errors.hpp"

namespace spherebot {

namespace {

int side(double e) { return (e > 0.0) - (e < 0.0); }

void check_window(std::size_t begin, std::size_t end, std::size_t n, const char* what) {
  if (begin >= end || end > n) {
    throw DomainError(std::string(what) + " window [" + std::to_string(begin) + ", " +
                      std::to_string(end) + ") is empty or outside " + std::to_string(n) +
                      " samples");
  }
}

}  // namespace

std::optional<double> rise_time(std::span<const double> y, double target, double dt) {
  if (y.empty()) {
    throw DomainError("rise_time on an empty series");
  }
  const int initial = side(y[0] - target);
  if (initial == 0) {
    return 0.0;
  }
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (side(y[i] - target) != initial) {
      const double frac = (target - y[i - 1]) / (y[i] - y[i - 1]);
      return (static_cast<double>(i - 1) + frac) * dt;
    }
  }
  return std::nullopt;
}

std::optional<double> settling_time(std::span<const double> y, double target, double band_frac,
                                    double dt, double zero_band) {
  if (!(band_frac > 0.0)) {
    throw DomainError("settling band must be positive");
  }
  if (y.empty()) {
    throw DomainError("settling_time on an empty series");
  }
  const double band = target == 0.0 ? zero_band : band_frac * std::abs(target);
  for (std::size_t i = y.size(); i-- > 0;) {
    if (std::abs(y[i] - target) > band) {
      if (i + 1 == y.size()) {
        return std::nullopt;
      }
      return static_cast<double>(i + 1) * dt;
    }
  }
  return 0.0;
}

ErrorWindows ErrorWindows::whole(std::size_t n) { return {0, n, 0, n, 0, n}; }

ErrorStats error_stats(std::span<const double> y, std::span<const double> target,
                       const ErrorWindows& w) {
  if (y.size() != target.size()) {
    throw DomainError("series and target lengths differ");
  }
  const std::size_t n = y.size();
  check_window(w.mean_begin, w.mean_end, n, "mean");
  check_window(w.steady_begin, w.steady_end, n, "steady-state");
  check_window(w.whole_begin, w.whole_end, n, "whole");

  ErrorStats s;
  double sum = 0.0;
  for (std::size_t i = w.mean_begin; i < w.mean_end; ++i) {
    sum += y[i] - target[i];
  }
  s.e_m = sum / static_cast<double>(w.mean_end - w.mean_begin);

  double sq = 0.0;
  s.dh_lo = y[w.steady_begin] - target[w.steady_begin];
  s.dh_hi = s.dh_lo;
  for (std::size_t i = w.steady_begin; i < w.steady_end; ++i) {
    const double e = y[i] - target[i];
    sq += e * e;
    s.dh_lo = std::min(s.dh_lo, e);
    s.dh_hi = std::max(s.dh_hi, e);
  }
  s.e_rmse = std::sqrt(sq / static_cast<double>(w.steady_end - w.steady_begin));

  double abs_sum = 0.0;
  for (std::size_t i = w.whole_begin; i < w.whole_end; ++i) {
    abs_sum += std::abs(y[i] - target[i]);
  }
  s.e_mae = abs_sum / static_cast<double>(w.whole_end - w.whole_begin);
  return s;
}

WindowStats same_window_stats(std::span<const double> y, std::span<const double> target,
                              std::size_t begin, std::size_t end) {
  const ErrorStats s = error_stats(y, target, {begin, end, begin, end, begin, end});
  return {s.e_rmse, s.e_mae};
}

PathDistance path_distance(const Trace& trace, const TrajectoryRef& ref, double skip) {
  if (trace.samples.empty()) {
    throw DomainError("path_distance on an empty trace");
  }
  PathDistance out;
  out.distance.reserve(trace.samples.size());
  double sum = 0.0;
  std::size_t count = 0;
  for (const TraceSample& s : trace.samples) {
    const PlanarPose r = ref.at(s.t).pose;
    const double d = std::hypot(s.state.pose.X - r.X, s.state.pose.Y - r.Y);
    out.distance.push_back(d);
    if (s.t >= skip) {
      sum += d;
      out.max = std::max(out.max, d);
      ++count;
    }
  }
  out.mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
  return out;
}

}  // namespace spherebot
