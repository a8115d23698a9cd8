#include "navobs/world.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace navobs {

LandmarkSet::LandmarkSet(std::vector<Vec3> positions, std::vector<double> weights)
    : positions_(std::move(positions)), weights_(std::move(weights)) {
  if (positions_.empty()) {
    throw InvalidArgument("LandmarkSet: at least one landmark required");
  }
  if (positions_.size() != weights_.size()) {
    throw InvalidArgument("LandmarkSet: positions and weights differ in length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      throw InvalidArgument("LandmarkSet: weight " + std::to_string(i) + " is not positive");
    }
    if (!positions_[i].allFinite()) {
      throw InvalidArgument("LandmarkSet: landmark " + std::to_string(i) + " is not finite");
    }
    sum += weights_[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidArgument("LandmarkSet: weights must sum to 1");
  }
}

LandmarkSet LandmarkSet::uniform(std::vector<Vec3> positions) {
  const std::size_t n = positions.size();
  if (n == 0) {
    throw InvalidArgument("LandmarkSet: at least one landmark required");
  }
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  // Absorb the rounding of 1/n into the last weight.
  w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
  return LandmarkSet(std::move(positions), std::move(w));
}

Vec3 LandmarkSet::center() const {
  Vec3 c = Vec3::Zero();
  for (std::size_t i = 0; i < size(); ++i) {
    c += weights_[i] * positions_[i];
  }
  return c;
}

NoiseSpec NoiseSpec::isotropic(double sigma_gyro, double sigma_accel, double sigma_landmark) {
  NoiseSpec n;
  n.cov_gyro = sigma_gyro * sigma_gyro * Mat3::Identity();
  n.cov_accel = sigma_accel * sigma_accel * Mat3::Identity();
  n.cov_landmark = sigma_landmark * sigma_landmark * Mat3::Identity();
  return n;
}

void NoiseSpec::validate() const {
  // GaussianSampler performs the symmetric-PSD check.
  (void)GaussianSampler(cov_gyro);
  (void)GaussianSampler(cov_accel);
  (void)GaussianSampler(cov_landmark);
}

StateDerivative derivative(const TrueState& s, const Vec3& omega, const Vec3& a, const Vec3& g) {
  const Mat3& r = s.X.R.matrix();
  return {r * hat3(omega), s.X.v, g + r * a};
}

ImuSample measure_imu(const TrueState& s, const Vec3& omega, const Vec3& a, const NoiseSpec& n,
                      CounterRng& rng) {
  const Vec3 nw = GaussianSampler(n.cov_gyro).sample(rng);
  const Vec3 na = GaussianSampler(n.cov_accel).sample(rng);
  return {s.t, omega + n.gyro_bias + nw, a + n.accel_bias + na};
}

LandmarkObservation measure_landmarks(const TrueState& s, const LandmarkSet& landmarks,
                                      const NoiseSpec& n, CounterRng& rng) {
  const GaussianSampler sampler(n.cov_landmark);
  const Mat3 rt = s.X.R.matrix().transpose();
  LandmarkObservation obs;
  obs.t = s.t;
  obs.y.reserve(landmarks.size());
  for (const Vec3& pi : landmarks.positions()) {
    obs.y.push_back(rt * (pi - s.X.p) + sampler.sample(rng));
  }
  return obs;
}

ConstellationStats constellation_stats(const LandmarkSet& landmarks) {
  ConstellationStats st;
  st.p_c = landmarks.center();
  st.M = Mat3::Zero();
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    const Vec3 a = landmarks.position(i) - st.p_c;
    st.M += landmarks.weight(i) * a * a.transpose();
  }
  st.M = (st.M + st.M.transpose()) / 2.0;
  st.M_bar = (st.M.trace() * Mat3::Identity() - st.M) / 2.0;
  st.eigenvalues = Eigen::SelfAdjointEigenSolver<Mat3>(st.M, Eigen::EigenvaluesOnly).eigenvalues();
  return st;
}

ObservabilityReport check_observability_conditions(const LandmarkSet& landmarks) {
  ObservabilityReport r;
  r.stats = constellation_stats(landmarks);
  const Vec3& ev = r.stats.eigenvalues;
  const double scale = ev(2);
  const double tol = 1e-9 * scale;

  r.non_collinear = landmarks.size() >= 3 && scale > 0.0 && ev(1) > tol;
  r.distinct_eigenvalues = scale > 0.0 && (ev(1) - ev(0)) > tol && (ev(2) - ev(1)) > tol;

  // Mbar eigenvalues are (tr M - lambda_i) / 2; the smallest pairs with lambda_max.
  const double trace = ev.sum();
  const double mbar_min = (trace - ev(2)) / 2.0;
  const double mbar_max = (trace - ev(0)) / 2.0;
  r.m_bar_positive_definite = scale > 0.0 && mbar_min > tol;
  r.kr_bound = trace - ev(0);
  r.sqrt_varsigma = r.m_bar_positive_definite ? mbar_min / mbar_max : 0.0;
  return r;
}

}  // namespace navobs
