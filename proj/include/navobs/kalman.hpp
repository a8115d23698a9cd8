#ifndef NAVOBS_KALMAN_HPP
#define NAVOBS_KALMAN_HPP

// Continuous-discrete EKF skeleton and its two inertial-navigation
// instances: the multiplicative EKF (linear position/velocity errors) and the
// right-invariant EKF on SE_2(3).

#include <Eigen/Core>

#include "navobs/lie.hpp"
#include "navobs/riccati.hpp"
#include "navobs/world.hpp"

namespace navobs {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Cov9 = Covariance<double, 9>;
using OutputMatrix9 = Eigen::Matrix<double, Eigen::Dynamic, 9>;

/// Error-state block offsets. MEKF: [theta, p, v]; IEKF: [theta, v, p].
namespace mekf_index {
inline constexpr int kTheta = 0;
inline constexpr int kPos = 3;
inline constexpr int kVel = 6;
}  // namespace mekf_index

namespace iekf_index {
inline constexpr int kTheta = 0;
inline constexpr int kVel = 3;
inline constexpr int kPos = 6;
}  // namespace iekf_index

// --- shared skeleton -------------------------------------------------------

/// P_dot = A P + P A^T + G V G^T over one step.
template <int N, int NoiseDim>
Covariance<double, N> ekf_propagate(const Covariance<double, N>& p, const SquareMatrix<double, N>& a,
                                    const Eigen::Matrix<double, N, NoiseDim>& g,
                                    const SquareMatrix<double, NoiseDim>& v, double dt) {
  const SquareMatrix<double, N> gvg = g * v * g.transpose();
  return cre_step(p, a, SquareMatrix<double, N>((gvg + gvg.transpose()) / 2.0), dt);
}

template <int N>
struct EkfCorrection {
  Eigen::Matrix<double, N, 1> dx;
  Covariance<double, N> P;
};

/// K = P C^T (C P C^T + R)^{-1}; returns K z and P - K C P. R is the
/// already-shaped output noise (N Q N^T).
template <int N>
EkfCorrection<N> ekf_correct(const Covariance<double, N>& p,
                             const Eigen::Matrix<double, Eigen::Dynamic, N>& c,
                             const Eigen::MatrixXd& r, const Eigen::VectorXd& z) {
  const auto upd = cd_riccati_update<double, N, Eigen::Dynamic>(p, c, r);
  return {upd.K * z, upd.P};
}

/// Block-diagonal stack of n copies of q.
Eigen::MatrixXd block_diagonal(const Mat3& q, std::size_t n);

/// blockdiag(cov_gyro, cov_accel) as a 6x6 matrix.
Mat6 imu_noise_matrix(const Mat3& gyro, const Mat3& accel);

/// Mean propagation shared by both filters: the truth integrator driven by
/// the measured (omega_m, a_m), followed by polar re-orthonormalization.
Pose propagate_mean(const Pose& est, const ImuSample& imu, const Vec3& g, double dt);

// --- MEKF ------------------------------------------------------------------

struct MekfState {
  Pose est;
  Cov9 P;
};

/// A_t: I3 at (p, v), -(R_hat a_m)^x at (v, theta).
Mat9 mekf_state_matrix(const Rot& r_hat, const Vec3& a_m);
/// G_t: R_hat maps gyro noise into theta and accel noise into v.
Eigen::Matrix<double, 9, 6> mekf_noise_matrix(const Rot& r_hat);
/// Rows [R_hat^T (p_i - p_hat)^x, -R_hat^T, 0] per landmark.
OutputMatrix9 mekf_output_matrix(const Pose& est, const LandmarkSet& landmarks);
/// z_i = y_i - R_hat^T (p_i - p_hat), stacked.
Eigen::VectorXd mekf_innovation(const Pose& est, const LandmarkObservation& obs,
                                const LandmarkSet& landmarks);

/// v is the 6x6 continuous IMU noise density blockdiag(gyro, accel).
MekfState mekf_predict(const MekfState& s, const ImuSample& imu, const Vec3& g, const Mat6& v,
                       double dt);
/// q_landmark is the per-landmark covariance; the stacked Q is block diagonal.
MekfState mekf_update(const MekfState& s, const LandmarkObservation& obs,
                      const LandmarkSet& landmarks, const Mat3& q_landmark);

// --- IEKF ------------------------------------------------------------------

struct IekfState {
  Pose est;
  Cov9 P;
};

/// Constant A_t: g^x at (v, theta), I3 at (p, v).
Mat9 iekf_state_matrix(const Vec3& g);
/// G_t = [R 0 0; v^x R  R 0; p^x R 0 R] evaluated at the estimate.
Mat9 iekf_noise_matrix(const Pose& est);
/// Rows [p_i^x, 0, -I3]; independent of the estimate.
OutputMatrix9 iekf_output_matrix(const LandmarkSet& landmarks);
/// N_t = blockdiag(R_hat, ..., R_hat).
Eigen::MatrixXd iekf_output_noise_matrix(const Pose& est, std::size_t n);
/// z_i = R_hat y_i + p_hat - p_i, stacked.
Eigen::VectorXd iekf_innovation(const Pose& est, const LandmarkObservation& obs,
                                const LandmarkSet& landmarks);

/// v is the 6x6 IMU noise density; the third noise block of n_x is zero.
IekfState iekf_predict(const IekfState& s, const ImuSample& imu, const Vec3& g, const Mat6& v,
                       double dt);
/// X_hat+ = exp(K z) X_hat with measurement covariance N Q N^T.
IekfState iekf_update(const IekfState& s, const LandmarkObservation& obs,
                      const LandmarkSet& landmarks, const Mat3& q_landmark);

}  // namespace navobs

#endif  // NAVOBS_KALMAN_HPP
