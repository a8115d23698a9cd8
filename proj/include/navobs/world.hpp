#ifndef NAVOBS_WORLD_HPP
#define NAVOBS_WORLD_HPP

// Rigid-body kinematics, IMU / landmark sensor models and landmark
// constellation descriptors.

#include <vector>

#include "navobs/lie.hpp"
#include "navobs/rng.hpp"

namespace navobs {

/// Ground truth at time t.
struct TrueState {
  Pose X;
  double t = 0.0;
};

/// Body-frame gyro rate and specific force.
struct ImuSample {
  double t = 0.0;
  Vec3 omega_m = Vec3::Zero();
  Vec3 a_m = Vec3::Zero();
};

/// Inertial landmark positions with positive weights summing to one.
class LandmarkSet {
 public:
  LandmarkSet() = default;
  /// Throws InvalidArgument on size mismatch, non-positive weights or
  /// |sum(k_i) - 1| > 1e-12.
  LandmarkSet(std::vector<Vec3> positions, std::vector<double> weights);

  /// Equal weights 1/N.
  static LandmarkSet uniform(std::vector<Vec3> positions);

  std::size_t size() const { return positions_.size(); }
  const std::vector<Vec3>& positions() const { return positions_; }
  const std::vector<double>& weights() const { return weights_; }
  const Vec3& position(std::size_t i) const { return positions_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// Weighted centre p_c.
  Vec3 center() const;

 private:
  std::vector<Vec3> positions_;
  std::vector<double> weights_;
};

/// Body-frame landmark measurements y_i at time t, ordered as the set.
struct LandmarkObservation {
  double t = 0.0;
  std::vector<Vec3> y;
};

/// Sensor noise covariances. Biases are part of the sensor model but are
/// assumed calibrated out: they stay zero unless a caller sets them, and no
/// observer estimates them.
struct NoiseSpec {
  Mat3 cov_gyro = Mat3::Zero();
  Mat3 cov_accel = Mat3::Zero();
  Mat3 cov_landmark = Mat3::Zero();
  Vec3 gyro_bias = Vec3::Zero();
  Vec3 accel_bias = Vec3::Zero();

  static NoiseSpec none() { return {}; }
  /// Isotropic standard deviations (rad/s, m/s^2, m).
  static NoiseSpec isotropic(double sigma_gyro, double sigma_accel, double sigma_landmark);

  /// Throws InvalidArgument unless every covariance is symmetric PSD.
  void validate() const;
};

struct StateDerivative {
  Mat3 R_dot;
  Vec3 p_dot;
  Vec3 v_dot;
};

/// (R w^, v, g + R a).
StateDerivative derivative(const TrueState& s, const Vec3& omega, const Vec3& a, const Vec3& g);

/// omega_m = omega + b_w + n_w, a_m = a + b_a + n_a. Always consumes six
/// normals from rng, whatever the covariances.
ImuSample measure_imu(const TrueState& s, const Vec3& omega, const Vec3& a, const NoiseSpec& n,
                      CounterRng& rng);

/// y_i = R^T (p_i - p) + n_i. Consumes three normals per landmark.
LandmarkObservation measure_landmarks(const TrueState& s, const LandmarkSet& landmarks,
                                      const NoiseSpec& n, CounterRng& rng);

struct ConstellationStats {
  Vec3 p_c;
  Mat3 M;            // sum k_i (p_i - p_c)(p_i - p_c)^T
  Mat3 M_bar;        // (tr(M) I - M) / 2
  Vec3 eigenvalues;  // of M, ascending
};

ConstellationStats constellation_stats(const LandmarkSet& landmarks);

struct ObservabilityReport {
  bool non_collinear = false;         // at least three non-collinear landmarks
  bool distinct_eigenvalues = false;  // M has three distinct eigenvalues
  bool m_bar_positive_definite = false;
  double kr_bound = 0.0;       // tr(M) - lambda_min(M); discrete attitude needs k_R * this < 1
  double sqrt_varsigma = 0.0;  // lambda_min(Mbar) / lambda_max(Mbar), 0 if Mbar is singular
  ConstellationStats stats;
};

ObservabilityReport check_observability_conditions(const LandmarkSet& landmarks);

}  // namespace navobs

#endif  // NAVOBS_WORLD_HPP
