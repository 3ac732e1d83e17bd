#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "spherebot/references.hpp"
#include "spherebot/simulator.hpp"

namespace spherebot {

/// First crossing of target from the initial side, interpolated linearly.
/// Throws DomainError on an empty series.
std::optional<double> rise_time(std::span<const double> y, double target, double dt);

/// Time of the first sample after the last one outside the band
/// band_frac * |target| (zero_band when target == 0). Absent when the final
/// sample is still outside.
std::optional<double> settling_time(std::span<const double> y, double target, double band_frac,
                                    double dt, double zero_band = 0.00872664625997164788);

/// Sample index ranges [begin, end) for each statistic.
struct ErrorWindows {
  std::size_t mean_begin = 0;
  std::size_t mean_end = 0;
  std::size_t steady_begin = 0;
  std::size_t steady_end = 0;
  std::size_t whole_begin = 0;
  std::size_t whole_end = 0;

  /// Every window spans the whole series.
  static ErrorWindows whole(std::size_t n);
};

struct ErrorStats {
  double e_m = 0.0;     ///< mean signed error, mean window
  double e_rmse = 0.0;  ///< steady window
  double e_mae = 0.0;   ///< whole window
  double dh_lo = 0.0;   ///< min signed error, steady window
  double dh_hi = 0.0;   ///< max signed error, steady window
};

/// Error is y - target. Throws DomainError on empty or out-of-range windows.
ErrorStats error_stats(std::span<const double> y, std::span<const double> target,
                       const ErrorWindows& windows);

struct WindowStats {
  double rmse = 0.0;
  double mae = 0.0;
};

/// RMSE and MAE over one common window.
WindowStats same_window_stats(std::span<const double> y, std::span<const double> target,
                              std::size_t begin, std::size_t end);

struct PathDistance {
  std::vector<double> distance;
  double mean = 0.0;
  double max = 0.0;
};

/// Distance from each sample's (X, Y) to the reference at the same t.
/// Mean and max cover samples with t >= skip. Throws DomainError on an empty
/// trace.
PathDistance path_distance(const Trace& trace, const TrajectoryRef& ref, double skip = 0.0);

struct MetricsReport {
  std::optional<double> t_r;
  std::optional<double> t_s;
  double e_m = 0.0;
  double e_rmse = 0.0;
  double e_mae = 0.0;
  double dh_lo = 0.0;
  double dh_hi = 0.0;
  std::optional<double> steady_start;
  std::optional<double> path_mean;
  std::optional<double> path_max;
};

}  // namespace spherebot
