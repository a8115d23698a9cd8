#include "navobs/bench/metrics.hpp"

#include <algorithm>

namespace navobs::bench {

double attitude_distance(const Rot& r) {
  const double x = (3.0 - r.matrix().trace()) / 4.0;
  return std::sqrt(std::clamp(x, 0.0, 1.0));
}

ErrorRecord compute_errors(const TrueState& truth, const Pose& est, const Vec3& p_c) {
  const Rot r_err = truth.X.R * est.R.inverse();
  const Mat3& re = r_err.matrix();
  ErrorRecord e;
  e.t = truth.t;
  e.att_err = attitude_distance(r_err);
  e.att_angle = r_err.angle();
  e.vel_err = truth.X.v - re * est.v;
  e.pos_err = truth.X.p - re * est.p - (Mat3::Identity() - re) * p_c;
  e.naive_pos = truth.X.p - est.p;
  e.naive_vel = truth.X.v - est.v;
  return e;
}

double log_slope(const std::vector<double>& t, const std::vector<double>& x, double floor) {
  double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size() && i < x.size(); ++i) {
    if (!(x[i] > floor)) {
      continue;
    }
    const double y = std::log(x[i]);
    n += 1.0;
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
  }
  const double den = n * stt - st * st;
  if (n < 2.0 || !(den > 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return (n * sty - st * sy) / den;
}

}  // namespace navobs::bench
