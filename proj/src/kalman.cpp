#include "navobs/kalman.hpp"

#include "navobs/scenario.hpp"

namespace navobs {

namespace {

void check_shapes(const LandmarkObservation& obs, const LandmarkSet& landmarks) {
  if (obs.y.size() != landmarks.size()) {
    throw InvalidArgument("observation size does not match the landmark set");
  }
}

}  // namespace

Eigen::MatrixXd block_diagonal(const Mat3& q, std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(3 * n);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    out.block<3, 3>(3 * i, 3 * i) = q;
  }
  return out;
}

Mat6 imu_noise_matrix(const Mat3& gyro, const Mat3& accel) {
  Mat6 v = Mat6::Zero();
  v.topLeftCorner<3, 3>() = gyro;
  v.bottomRightCorner<3, 3>() = accel;
  return v;
}

Pose propagate_mean(const Pose& est, const ImuSample& imu, const Vec3& g, double dt) {
  Pose out = integrate_true(TrueState{est, 0.0}, imu.omega_m, imu.a_m, g, dt).X;
  out.R = Rot::nearest(out.R.matrix());
  return out;
}

// --- MEKF ------------------------------------------------------------------

Mat9 mekf_state_matrix(const Rot& r_hat, const Vec3& a_m) {
  using namespace mekf_index;
  Mat9 a = Mat9::Zero();
  a.block<3, 3>(kPos, kVel) = Mat3::Identity();
  a.block<3, 3>(kVel, kTheta) = -hat3(Vec3(r_hat * a_m));
  return a;
}

Eigen::Matrix<double, 9, 6> mekf_noise_matrix(const Rot& r_hat) {
  using namespace mekf_index;
  Eigen::Matrix<double, 9, 6> g = Eigen::Matrix<double, 9, 6>::Zero();
  g.block<3, 3>(kTheta, 0) = r_hat.matrix();
  g.block<3, 3>(kVel, 3) = r_hat.matrix();
  return g;
}

OutputMatrix9 mekf_output_matrix(const Pose& est, const LandmarkSet& landmarks) {
  using namespace mekf_index;
  const Mat3 rt = est.R.matrix().transpose();
  OutputMatrix9 c = OutputMatrix9::Zero(static_cast<Eigen::Index>(3 * landmarks.size()), 9);
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(3 * i);
    c.block<3, 3>(row, kTheta) = rt * hat3(Vec3(landmarks.position(i) - est.p));
    c.block<3, 3>(row, kPos) = -rt;
  }
  return c;
}

Eigen::VectorXd mekf_innovation(const Pose& est, const LandmarkObservation& obs,
                                const LandmarkSet& landmarks) {
  check_shapes(obs, landmarks);
  const Mat3 rt = est.R.matrix().transpose();
  Eigen::VectorXd z(static_cast<Eigen::Index>(3 * landmarks.size()));
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    z.segment<3>(static_cast<Eigen::Index>(3 * i)) = obs.y[i] - rt * (landmarks.position(i) - est.p);
  }
  return z;
}

MekfState mekf_predict(const MekfState& s, const ImuSample& imu, const Vec3& g, const Mat6& v,
                       double dt) {
  const Mat9 a = mekf_state_matrix(s.est.R, imu.a_m);
  const auto gm = mekf_noise_matrix(s.est.R);
  return {propagate_mean(s.est, imu, g, dt), ekf_propagate<9, 6>(s.P, a, gm, v, dt)};
}

MekfState mekf_update(const MekfState& s, const LandmarkObservation& obs,
                      const LandmarkSet& landmarks, const Mat3& q_landmark) {
  using namespace mekf_index;
  const Eigen::VectorXd z = mekf_innovation(s.est, obs, landmarks);
  const OutputMatrix9 c = mekf_output_matrix(s.est, landmarks);
  const auto corr = ekf_correct<9>(s.P, c, block_diagonal(q_landmark, landmarks.size()), z);
  Pose est;
  est.R = exp_so3(Vec3(corr.dx.segment<3>(kTheta))) * s.est.R;
  est.p = s.est.p + corr.dx.segment<3>(kPos);
  est.v = s.est.v + corr.dx.segment<3>(kVel);
  return {est, corr.P};
}

// --- IEKF ------------------------------------------------------------------

Mat9 iekf_state_matrix(const Vec3& g) {
  using namespace iekf_index;
  Mat9 a = Mat9::Zero();
  a.block<3, 3>(kVel, kTheta) = hat3(g);
  a.block<3, 3>(kPos, kVel) = Mat3::Identity();
  return a;
}

Mat9 iekf_noise_matrix(const Pose& est) {
  using namespace iekf_index;
  const Mat3& r = est.R.matrix();
  Mat9 g = Mat9::Zero();
  g.block<3, 3>(kTheta, 0) = r;
  g.block<3, 3>(kVel, 0) = hat3(est.v) * r;
  g.block<3, 3>(kVel, 3) = r;
  g.block<3, 3>(kPos, 0) = hat3(est.p) * r;
  g.block<3, 3>(kPos, 6) = r;
  return g;
}

OutputMatrix9 iekf_output_matrix(const LandmarkSet& landmarks) {
  using namespace iekf_index;
  OutputMatrix9 c = OutputMatrix9::Zero(static_cast<Eigen::Index>(3 * landmarks.size()), 9);
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(3 * i);
    c.block<3, 3>(row, kTheta) = hat3(landmarks.position(i));
    c.block<3, 3>(row, kPos) = -Mat3::Identity();
  }
  return c;
}

Eigen::MatrixXd iekf_output_noise_matrix(const Pose& est, std::size_t n) {
  return block_diagonal(est.R.matrix(), n);
}

Eigen::VectorXd iekf_innovation(const Pose& est, const LandmarkObservation& obs,
                                const LandmarkSet& landmarks) {
  check_shapes(obs, landmarks);
  Eigen::VectorXd z(static_cast<Eigen::Index>(3 * landmarks.size()));
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    z.segment<3>(static_cast<Eigen::Index>(3 * i)) =
        est.R * obs.y[i] + est.p - landmarks.position(i);
  }
  return z;
}

IekfState iekf_predict(const IekfState& s, const ImuSample& imu, const Vec3& g, const Mat6& v,
                       double dt) {
  Mat9 v9 = Mat9::Zero();
  v9.topLeftCorner<6, 6>() = v;
  return {propagate_mean(s.est, imu, g, dt),
          ekf_propagate<9, 9>(s.P, iekf_state_matrix(g), iekf_noise_matrix(s.est), v9, dt)};
}

IekfState iekf_update(const IekfState& s, const LandmarkObservation& obs,
                      const LandmarkSet& landmarks, const Mat3& q_landmark) {
  using namespace iekf_index;
  const Eigen::VectorXd z = iekf_innovation(s.est, obs, landmarks);
  const Eigen::MatrixXd nt = iekf_output_noise_matrix(s.est, landmarks.size());
  const Eigen::MatrixXd r = nt * block_diagonal(q_landmark, landmarks.size()) * nt.transpose();
  const auto corr = ekf_correct<9>(s.P, iekf_output_matrix(landmarks), r, z);
  Tangent9 xi;
  xi.theta = corr.dx.segment<3>(kTheta);
  xi.alpha = corr.dx.segment<3>(kVel);
  xi.nu = corr.dx.segment<3>(kPos);
  return {exp_se23(xi) * s.est, corr.P};
}

}  // namespace navobs
