#include "navobs/geometric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

namespace navobs {

namespace {

Pose translation(const Vec3& p) {
  Pose x;
  x.p = p;
  return x;
}

Mat3 symmetric_part(const Mat3& m) { return (m + m.transpose()) / 2.0; }

}  // namespace

Innovation innovations(const Pose& est, const LandmarkObservation& obs,
                       const LandmarkSet& landmarks) {
  if (obs.y.size() != landmarks.size()) {
    throw InvalidArgument("observation size does not match the landmark set");
  }
  const Vec3 p_c = landmarks.center();
  Innovation out;
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    const double k = landmarks.weight(i);
    const Vec3 e = landmarks.position(i) - est.p - est.R * obs.y[i];
    out.sigma_R += 0.5 * k * (landmarks.position(i) - p_c).cross(e);
    out.y += k * e;
  }
  return out;
}

Correction correction_from_innovation(const Innovation& inn, const Gains& gains) {
  return {gains.k_R() * inn.sigma_R, gains.K_p() * inn.y, gains.K_v() * inn.y};
}

Mat5 correction_matrix(const Pose& est, const LandmarkObservation& obs,
                       const LandmarkSet& landmarks, const Gains& gains) {
  if (obs.y.size() != landmarks.size()) {
    throw InvalidArgument("observation size does not match the landmark set");
  }
  const Vec3 p_c = landmarks.center();
  const Pose x_c = translation(p_c);
  const Mat5 x_hat = est.embed();
  const Mat5 x_c_inv = x_c.inverse().embed();
  Mat5 e = Mat5::Zero();
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    Eigen::Matrix<double, 5, 1> r;
    r << landmarks.position(i), 0.0, 1.0;
    Eigen::Matrix<double, 5, 1> r_hat;
    r_hat << obs.y[i], 0.0, 1.0;
    const Eigen::Matrix<double, 5, 1> r_bar = x_c_inv * r;
    e += landmarks.weight(i) * (r - x_hat * r_hat) * r_bar.transpose();
  }
  return adjoint(x_c, Mat5(-proj_gain(e, gains)));
}

Correction correction_from_matrix(const Mat5& u, const Vec3& p_c) {
  const Mat3 omega = u.block<3, 3>(0, 0);
  Correction c;
  c.s = -vee3(omega);
  c.dv = -u.block<3, 1>(0, 3);
  c.dp = -(u.block<3, 1>(0, 4) + omega * p_c);
  return c;
}

Mat5 observer_rate(const Pose& est, const ImuSample& imu, const Correction& c, const Vec3& p_c,
                   const Vec3& g) {
  Mat5 f = Mat5::Zero();
  f.block<3, 3>(0, 0) = est.R.matrix() * hat3(imu.omega_m);
  f.block<3, 1>(0, 3) = g + est.R * imu.a_m;
  f.block<3, 1>(0, 4) = est.v;

  const Mat3 omega = -hat3(c.s);
  Mat5 u = Mat5::Zero();
  u.block<3, 3>(0, 0) = omega;
  u.block<3, 1>(0, 3) = -c.dv;
  u.block<3, 1>(0, 4) = -c.dp - omega * p_c;
  return f - u * est.embed();
}

Pose flow_corrected(const Pose& est, const ImuSample& imu, const Correction& c, const Vec3& p_c,
                    const Vec3& g, double dt) {
  if (!(dt > 0.0)) {
    throw InvalidArgument("flow_corrected: dt must be positive");
  }
  const Rot r_mid = exp_so3(Vec3(c.s * (dt / 2.0))) * est.R * exp_so3(Vec3(imu.omega_m * (dt / 2.0)));
  const Vec3 acc = g + r_mid * imu.a_m;
  const Mat3 s_hat = hat3(c.s);

  using State = Eigen::Matrix<double, 6, 1>;  // (p, v)
  auto rhs = [&](const State& x) -> State {
    State d;
    d.head<3>() = x.tail<3>() + s_hat * (x.head<3>() - p_c) + c.dp;
    d.tail<3>() = acc + s_hat * x.tail<3>() + c.dv;
    return d;
  };
  State x;
  x << est.p, est.v;
  const State k1 = rhs(x);
  const State k2 = rhs(State(x + (dt / 2.0) * k1));
  const State k3 = rhs(State(x + (dt / 2.0) * k2));
  const State k4 = rhs(State(x + dt * k3));
  x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  Pose out;
  out.R = Rot::nearest(
      (exp_so3(Vec3(c.s * dt)) * est.R * exp_so3(Vec3(imu.omega_m * dt))).matrix());
  out.p = x.head<3>();
  out.v = x.tail<3>();
  return out;
}

Pose flow_corrected(const Pose& est, const ImuSample& imu, const Correction& c, const Vec3& p_c,
                    const Vec3& g, double dt, const Mat3& K_p, const Mat3& K_v) {
  Pose out = flow_corrected(est, imu, Correction{c.s, Vec3::Zero(), Vec3::Zero()}, p_c, g, dt);
  if (c.dp.isZero(0.0) && c.dv.isZero(0.0)) {
    return out;
  }
  // Delta' = F Delta + b, Delta(0) = 0, solved through exp([[F, b], [0, 0]] dt).
  const Mat3 s_hat = hat3(c.s);
  Eigen::Matrix<double, 7, 7> m = Eigen::Matrix<double, 7, 7>::Zero();
  m.block<3, 3>(0, 0) = s_hat - K_p;
  m.block<3, 3>(0, 3) = Mat3::Identity();
  m.block<3, 3>(3, 0) = -K_v;
  m.block<3, 3>(3, 3) = s_hat;
  m.block<3, 1>(0, 6) = c.dp;
  m.block<3, 1>(3, 6) = c.dv;
  const Eigen::Matrix<double, 7, 7> e = (m * dt).exp();
  out.p += e.block<3, 1>(0, 6);
  out.v += e.block<3, 1>(3, 6);
  if (!out.p.allFinite() || !out.v.allFinite()) {
    throw NumericalError("flow_corrected: non-finite state");
  }
  return out;
}

Eigen::Matrix<double, 6, 1> gravity_disturbance(const Rot& r_err, const Vec3& g) {
  Eigen::Matrix<double, 6, 1> d;
  d << Vec3::Zero(), (Mat3::Identity() - r_err.matrix()) * g;
  return d;
}

// --- variable translational gains -----------------------------------------

double default_epsilon(const Mat6& v_bar) {
  const double n = v_bar.norm();
  return n > 0.0 ? 1e-6 * n : 1e-9;
}

Mat6 translational_error_matrix(const Vec3& omega_m) {
  Mat6 a = Mat6::Zero();
  a.block<3, 3>(0, 0) = -hat3(omega_m);
  a.block<3, 3>(0, 3) = Mat3::Identity();
  a.block<3, 3>(3, 3) = -hat3(omega_m);
  return a;
}

Eigen::Matrix<double, 6, 6> translational_noise_matrix(const Pose& est, const Vec3& p_c) {
  const Mat3 rt = est.R.matrix().transpose();
  Mat6 g = Mat6::Zero();
  g.block<3, 3>(0, 0) = hat3(Vec3(rt * (est.p - p_c)));
  g.block<3, 3>(3, 0) = hat3(Vec3(rt * est.v));
  g.block<3, 3>(3, 3) = Mat3::Identity();
  return g;
}

Mat6 translational_process_noise(const Pose& est, const Vec3& p_c, const VariableGainTuning& t) {
  const Mat6 g = translational_noise_matrix(est, p_c);
  const Mat6 v = g * t.v_bar * g.transpose() + t.epsilon * Mat6::Identity();
  return (v + v.transpose()) / 2.0;
}

Mat3 innovation_noise(const Pose& est, const LandmarkSet& landmarks, const Mat3& q_bar) {
  double k2 = 0.0;
  for (double k : landmarks.weights()) {
    k2 += k * k;
  }
  const Mat3& r = est.R.matrix();
  return symmetric_part(k2 * r * q_bar * r.transpose());
}

Eigen::Matrix<double, 3, 6> translational_output_matrix() {
  Eigen::Matrix<double, 3, 6> c = Eigen::Matrix<double, 3, 6>::Zero();
  c.block<3, 3>(0, 0) = Mat3::Identity();
  return c;
}

RiccatiGain propagate_gain_covariance(const RiccatiGain& g, const Pose& est, const Vec3& omega_m,
                                      const Vec3& p_c, double dt) {
  return {cre_step(g.P, translational_error_matrix(omega_m),
                   translational_process_noise(est, p_c, g.tuning), dt),
          g.tuning};
}

TranslationalGains variable_gain_update(RiccatiGain& g, const Pose& est,
                                        const LandmarkSet& landmarks) {
  const auto upd = cd_riccati_update<double, 6, 3>(g.P, translational_output_matrix(),
                                                   innovation_noise(est, landmarks, g.tuning.q_bar));
  g.P = upd.P;
  return {upd.K.topRows<3>(), upd.K.bottomRows<3>()};
}

namespace {

Mat3 inverse_innovation_density(const Pose& est, const LandmarkSet& landmarks, const Mat3& q_bar) {
  const Mat3 q = innovation_noise(est, landmarks, q_bar);
  const Eigen::LLT<Mat3> llt(q);
  if (llt.info() != Eigen::Success) {
    throw NonPositive("continuous variable gain: innovation noise density is not positive definite");
  }
  return symmetric_part(llt.solve(Mat3::Identity()));
}

}  // namespace

TranslationalGains continuous_variable_gains(const RiccatiGain& g, const Pose& est,
                                             const LandmarkSet& landmarks) {
  const Mat3 q = inverse_innovation_density(est, landmarks, g.tuning.q_bar);
  const Eigen::Matrix<double, 6, 3> k =
      g.P.matrix() * translational_output_matrix().transpose() * q;
  const Mat3& r = est.R.matrix();
  return {r * k.topRows<3>() * r.transpose(), r * k.bottomRows<3>() * r.transpose()};
}

RiccatiGain continuous_gain_step(const RiccatiGain& g, const Pose& est, const Vec3& omega_m,
                                 const LandmarkSet& landmarks, double dt) {
  const Mat3 q = inverse_innovation_density(est, landmarks, g.tuning.q_bar);
  const Eigen::Matrix<double, 3, 6> c = translational_output_matrix();
  return {cre_step<double, 6, 3>(g.P, translational_error_matrix(omega_m),
                                 translational_process_noise(est, landmarks.center(), g.tuning), c,
                                 q, dt),
          g.tuning};
}

// --- observer steps ----------------------------------------------------------

namespace {

template <typename CorrectionFn>
GeoObserverState continuous_step(const GeoObserverState& s, const ImuSample& imu,
                                 const LandmarkSet& landmarks, const Vec3& g, double dt,
                                 CorrectionFn&& correction) {
  GeoObserverState out = s;
  if (out.riccati) {
    const auto k = continuous_variable_gains(*out.riccati, s.est, landmarks);
    out.gains.set_translational(k.K_p, k.K_v);
  }
  const Vec3 p_c = landmarks.center();
  out.est = flow_corrected(s.est, imu, correction(out.gains), p_c, g, dt, out.gains.K_p(),
                           out.gains.K_v());
  if (out.riccati) {
    out.riccati = continuous_gain_step(*out.riccati, s.est, imu.omega_m, landmarks, dt);
  }
  return out;
}

}  // namespace

GeoObserverState continuous_observer_step(const GeoObserverState& s, const ImuSample& imu,
                                          const LandmarkObservation& obs,
                                          const LandmarkSet& landmarks, const Vec3& g, double dt) {
  const Innovation inn = innovations(s.est, obs, landmarks);
  return continuous_step(s, imu, landmarks, g, dt, [&](const Gains& gains) {
    return correction_from_innovation(inn, gains);
  });
}

GeoObserverState continuous_observer_step_matrix_form(const GeoObserverState& s,
                                                      const ImuSample& imu,
                                                      const LandmarkObservation& obs,
                                                      const LandmarkSet& landmarks, const Vec3& g,
                                                      double dt) {
  return continuous_step(s, imu, landmarks, g, dt, [&](const Gains& gains) {
    return correction_from_matrix(correction_matrix(s.est, obs, landmarks, gains),
                                  landmarks.center());
  });
}

GeoObserverState hybrid_discrete_attitude_flow(const GeoObserverState& s, const ImuSample& imu,
                                               const LandmarkSet& landmarks, const Vec3& g,
                                               double dt) {
  GeoObserverState out = s;
  const Vec3 p_c = landmarks.center();
  out.est = flow_corrected(s.est, imu, Correction{}, p_c, g, dt);
  if (out.riccati) {
    out.riccati = propagate_gain_covariance(*out.riccati, s.est, imu.omega_m, p_c, dt);
  }
  return out;
}

GeoObserverState hybrid_discrete_attitude_jump(const GeoObserverState& s,
                                               const LandmarkObservation& obs,
                                               const LandmarkSet& landmarks) {
  GeoObserverState out = s;
  if (out.riccati) {
    const auto k = variable_gain_update(*out.riccati, s.est, landmarks);
    out.gains.set_translational(k.K_p, k.K_v);
  }
  const Innovation inn = innovations(s.est, obs, landmarks);
  const Vec3 p_c = landmarks.center();
  const Mat3& r = s.est.R.matrix();
  const Rot r_sigma = cayley(Vec3(2.0 * out.gains.k_R() * inn.sigma_R));
  out.est.R = Rot::nearest((r_sigma * s.est.R).matrix());
  out.est.p = r_sigma * Vec3(s.est.p - p_c + r * out.gains.K_p() * r.transpose() * inn.y) + p_c;
  out.est.v = r_sigma * Vec3(s.est.v + r * out.gains.K_v() * r.transpose() * inn.y);
  return out;
}

GeoObserverState hybrid_continuous_attitude_flow(const GeoObserverState& s, const ImuSample& imu,
                                                 const LandmarkSet& landmarks, const Vec3& g,
                                                 double dt) {
  GeoObserverState out = s;
  const Vec3 p_c = landmarks.center();
  out.est = flow_corrected(s.est, imu, Correction{s.eta, Vec3::Zero(), Vec3::Zero()}, p_c, g, dt);
  if (out.riccati) {
    out.riccati = propagate_gain_covariance(*out.riccati, s.est, imu.omega_m, p_c, dt);
  }
  return out;
}

GeoObserverState hybrid_continuous_attitude_jump(const GeoObserverState& s,
                                                 const LandmarkObservation& obs,
                                                 const LandmarkSet& landmarks) {
  GeoObserverState out = s;
  if (out.riccati) {
    const auto k = variable_gain_update(*out.riccati, s.est, landmarks);
    out.gains.set_translational(k.K_p, k.K_v);
  }
  const Innovation inn = innovations(s.est, obs, landmarks);
  const Mat3& r = s.est.R.matrix();
  out.eta = out.gains.k_R() * inn.sigma_R;
  out.est.p = s.est.p + r * out.gains.K_p() * r.transpose() * inn.y;
  out.est.v = s.est.v + r * out.gains.K_v() * r.transpose() * inn.y;
  return out;
}

double default_discrete_attitude_gain(const ConstellationStats& stats) {
  const double bound = stats.M.trace() - stats.eigenvalues(0);
  if (!(bound > 0.0)) {
    throw InvalidArgument("landmark constellation is degenerate");
  }
  return 0.9 / bound;
}

double default_continuous_attitude_gain(const ConstellationStats& stats, double T_M) {
  const double lmax =
      Eigen::SelfAdjointEigenSolver<Mat3>(stats.M_bar, Eigen::EigenvaluesOnly).eigenvalues()(2);
  if (!(lmax > 0.0) || !(T_M > 0.0)) {
    throw InvalidArgument("continuous attitude gain needs T_M > 0 and a non-degenerate constellation");
  }
  return 1.0 / (T_M * lmax);
}

// --- fixed-gain certificate ------------------------------------------------

Mat6 flow_transition(double tau) {
  Mat6 phi = Mat6::Identity();
  phi.block<3, 3>(0, 3) = tau * Mat3::Identity();
  return phi;
}

Mat6 jump_matrix(double k_p, double k_v) {
  Eigen::Matrix<double, 6, 3> k;
  k << k_p * Mat3::Identity(), k_v * Mat3::Identity();
  return Mat6::Identity() - k * translational_output_matrix();
}

FixedGainDesign fixed_gain_design(double k_p, double k_v, double T_m, double T_M, int grid_size) {
  if (!(k_p >= 0.0) || !(k_v >= 0.0)) {
    throw InvalidArgument("fixed_gain_design: gains must be non-negative");
  }
  if (!(T_m > 0.0) || !(T_M >= T_m)) {
    throw InvalidArgument("fixed_gain_design: need 0 < T_m <= T_M");
  }
  if (grid_size < 1) {
    throw InvalidArgument("fixed_gain_design: grid_size must be positive");
  }
  FixedGainDesign d;
  d.K << k_p * Mat3::Identity(), k_v * Mat3::Identity();
  d.tau_star = (T_m + T_M) / 2.0;
  const Mat6 a_g = jump_matrix(k_p, k_v);
  const Mat6 a_d = flow_transition(d.tau_star) * a_g;

  d.spectral_radius = Eigen::EigenSolver<Mat6>(a_d, false).eigenvalues().cwiseAbs().maxCoeff();
  if (!(d.spectral_radius < 1.0)) {
    d.reason = "A_d is not Schur stable at the midpoint interval";
    return d;
  }

  // vec(A^T P A) = (A^T kron A^T) vec(P)
  using Mat36 = Eigen::Matrix<double, 36, 36>;
  Mat36 kron;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      kron.block<6, 6>(6 * i, 6 * j) = a_d(j, i) * a_d.transpose();
    }
  }
  const Mat36 lhs = Mat36::Identity() - kron;
  const Eigen::FullPivLU<Mat36> lu(lhs);
  if (!lu.isInvertible()) {
    d.reason = "discrete Lyapunov equation is singular";
    return d;
  }
  const Eigen::Matrix<double, 36, 1> rhs = Eigen::Map<const Eigen::Matrix<double, 36, 1>>(
      Mat6::Identity().eval().data());
  const Eigen::Matrix<double, 36, 1> vec_p = lu.solve(rhs);
  Mat6 p = Eigen::Map<const Mat6>(vec_p.data());
  p = (p + p.transpose()) / 2.0;
  d.P = p;
  if (Eigen::LLT<Mat6>(p).info() != Eigen::Success) {
    d.reason = "Lyapunov solution is not positive definite";
    return d;
  }

  d.worst_eigenvalue = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid_size; ++j) {
    const double tau =
        grid_size == 1 ? T_m : T_m + (T_M - T_m) * static_cast<double>(j) / (grid_size - 1);
    const Mat6 a = flow_transition(tau) * a_g;
    Mat6 lyap = a.transpose() * p * a - p;
    lyap = (lyap + lyap.transpose()) / 2.0;
    const double lmax =
        Eigen::SelfAdjointEigenSolver<Mat6>(lyap, Eigen::EigenvaluesOnly).eigenvalues()(5);
    if (lmax > d.worst_eigenvalue) {
      d.worst_eigenvalue = lmax;
      d.worst_tau = tau;
    }
  }
  if (!(d.worst_eigenvalue < 0.0)) {
    d.reason = "Lyapunov decrease fails on the sampling-interval grid";
    return d;
  }
  d.certified = true;
  return d;
}

}  // namespace navobs
