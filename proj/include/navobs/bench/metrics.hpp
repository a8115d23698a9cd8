#ifndef NAVOBS_BENCH_METRICS_HPP
#define NAVOBS_BENCH_METRICS_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "navobs/lie.hpp"
#include "navobs/world.hpp"

namespace navobs::bench {

/// Estimation errors at one epoch.
///   R~ = R R_hat^T
///   v~ = v - R~ v_hat
///   p~ = p - R~ p_hat - (I - R~) p_c
/// att_err is |R~|_I = sqrt(tr(I - R~) / 4), which equals sin(angle / 2).
struct ErrorRecord {
  double t = 0.0;
  double att_err = 0.0;
  double att_angle = 0.0;  // rad
  Vec3 pos_err = Vec3::Zero();
  Vec3 vel_err = Vec3::Zero();
  Vec3 naive_pos = Vec3::Zero();  // p - p_hat
  Vec3 naive_vel = Vec3::Zero();  // v - v_hat
  double trace_P = std::numeric_limits<double>::quiet_NaN();

  double pos_norm() const { return pos_err.norm(); }
  double vel_norm() const { return vel_err.norm(); }
};

ErrorRecord compute_errors(const TrueState& truth, const Pose& est, const Vec3& p_c);

/// Normalized attitude distance sqrt(tr(I - R) / 4), clamped to [0, 1].
double attitude_distance(const Rot& r);

/// Least-squares slope of log(x) against t over the samples with x > floor.
/// Returns NaN if fewer than two samples qualify.
double log_slope(const std::vector<double>& t, const std::vector<double>& x, double floor = 1e-14);

}  // namespace navobs::bench

#endif  // NAVOBS_BENCH_METRICS_HPP
