#ifndef NAVOBS_GEOMETRIC_HPP
#define NAVOBS_GEOMETRIC_HPP

// Nonlinear geometric observers on SE_2(3) driven by landmark innovations:
// the continuous-measurement observer, the two hybrid observers for
// intermittent measurements, the fixed-gain certificate and the
// Riccati-based variable translational gains.

#include <optional>
#include <string>

#include <Eigen/Core>

#include "navobs/lie.hpp"
#include "navobs/riccati.hpp"
#include "navobs/world.hpp"

namespace navobs {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Cov6 = Covariance<double, 6>;

// --- innovation ------------------------------------------------------------

/// sigma_R = 1/2 sum k_i (p_i - p_c)^x (p_i - p_hat - R_hat y_i),
/// y       = sum k_i (p_i - p_hat - R_hat y_i).
struct Innovation {
  Vec3 sigma_R = Vec3::Zero();
  Vec3 y = Vec3::Zero();
};

Innovation innovations(const Pose& est, const LandmarkObservation& obs,
                       const LandmarkSet& landmarks);

/// Observer correction in the form
///   R_hat' = R_hat w^ + s^ R_hat
///   p_hat' = v_hat + s^ (p_hat - p_c) + dp
///   v_hat' = g + R_hat a + s^ v_hat + dv
struct Correction {
  Vec3 s = Vec3::Zero();
  Vec3 dp = Vec3::Zero();
  Vec3 dv = Vec3::Zero();
};

/// s = k_R sigma_R, dp = K_p y, dv = K_v y.
Correction correction_from_innovation(const Innovation& inn, const Gains& gains);

/// The same correction assembled in matrix form: U = Ad_{X_c}(-P_K(E)) with
/// E = sum k_i (r_i - X_hat r_hat_i) r_bar_i^T, X_c the pure translation by
/// p_c and r_hat_i = (y_i, 0, 1).
Mat5 correction_matrix(const Pose& est, const LandmarkObservation& obs,
                       const LandmarkSet& landmarks, const Gains& gains);

/// Reads (s, dp, dv) back out of U = [[Omega, w, u - Omega p_c]].
Correction correction_from_matrix(const Mat5& u, const Vec3& p_c);

/// X_hat' = X_hat (omega_m, a_m)-kinematics - U X_hat, as a 5x5 matrix.
Mat5 observer_rate(const Pose& est, const ImuSample& imu, const Correction& c, const Vec3& p_c,
                   const Vec3& g);

/// Integrates the corrected kinematics over dt with the correction held
/// constant. The rotation is exact, R(dt) = exp(s dt) R_hat exp(w dt); the
/// (p, v) pair is RK4 with the specific force taken at the half step. With a
/// zero correction this reproduces the truth integrator.
Pose flow_corrected(const Pose& est, const ImuSample& imu, const Correction& c, const Vec3& p_c,
                    const Vec3& g, double dt);

/// Same flow, but the translational correction is not held: over the step the
/// innovation is taken to shrink by the correction already applied,
/// y(t) = y - Delta_p(t), with c.dp = K_p y and c.dv = K_v y. Delta then solves
/// a linear system that is integrated exactly, which stays stable when
/// K_p dt is large. Reduces to the held flow as K dt -> 0 and leaves a zero
/// correction untouched.
Pose flow_corrected(const Pose& est, const ImuSample& imu, const Correction& c, const Vec3& p_c,
                    const Vec3& g, double dt, const Mat3& K_p, const Mat3& K_v);

/// Gravity disturbance in the translational error dynamics,
/// delta_g = [0; (I - R~) g], which vanishes as R~ -> I.
Eigen::Matrix<double, 6, 1> gravity_disturbance(const Rot& r_err, const Vec3& g);

// --- variable translational gains -----------------------------------------

/// Tuning for the Riccati gains. v_bar is blockdiag(gyro, accel) noise
/// density; q_bar is the per-landmark measurement covariance (intermittent)
/// or density (continuous). epsilon regularizes V_t.
struct VariableGainTuning {
  Mat6 v_bar = Mat6::Identity();
  Mat3 q_bar = Mat3::Identity();
  double epsilon = 0.0;
};

/// Default epsilon: 1e-6 ||v_bar||, or 1e-9 if v_bar is zero.
double default_epsilon(const Mat6& v_bar);

struct RiccatiGain {
  Cov6 P;
  VariableGainTuning tuning;
};

/// [[-w^, I], [0, -w^]] for the error (R^T p~, R^T v~).
Mat6 translational_error_matrix(const Vec3& omega_m);
/// [[(R_hat^T (p_hat - p_c))^x, 0], [(R_hat^T v_hat)^x, I]].
Eigen::Matrix<double, 6, 6> translational_noise_matrix(const Pose& est, const Vec3& p_c);
/// V_t = G v_bar G^T + epsilon I.
Mat6 translational_process_noise(const Pose& est, const Vec3& p_c, const VariableGainTuning& t);
/// sum k_i^2 R_hat q_bar R_hat^T.
Mat3 innovation_noise(const Pose& est, const LandmarkSet& landmarks, const Mat3& q_bar);
/// C = [I 0].
Eigen::Matrix<double, 3, 6> translational_output_matrix();

/// P' = A P + P A^T + V_t over one step (between measurements).
RiccatiGain propagate_gain_covariance(const RiccatiGain& g, const Pose& est, const Vec3& omega_m,
                                      const Vec3& p_c, double dt);

struct TranslationalGains {
  Mat3 K_p;
  Mat3 K_v;
};

/// Discrete update at a measurement: K = P C^T (C P C^T + Q_t)^{-1},
/// (K_p; K_v) = K, P+ = P - K C P.
TranslationalGains variable_gain_update(RiccatiGain& g, const Pose& est,
                                        const LandmarkSet& landmarks);

/// Continuous version: K = P C^T Q_t where Q_t is the inverse of the
/// innovation noise density; K_p = R_hat K_1 R_hat^T, K_v = R_hat K_2 R_hat^T.
TranslationalGains continuous_variable_gains(const RiccatiGain& g, const Pose& est,
                                             const LandmarkSet& landmarks);
/// P' = A P + P A^T - P C^T Q_t C P + V_t over one step.
RiccatiGain continuous_gain_step(const RiccatiGain& g, const Pose& est, const Vec3& omega_m,
                                 const LandmarkSet& landmarks, double dt);

// --- observer state and steps ----------------------------------------------

struct GeoObserverState {
  Pose est;
  Vec3 eta = Vec3::Zero();  // held attitude correction (continuous-attitude hybrid)
  Gains gains = Gains::isotropic(1.0, 0.0, 0.0);
  std::optional<RiccatiGain> riccati;  // present for variable translational gains
};

/// One IMU step of the continuous-measurement observer. obs is the
/// landmark measurement at the start of the step.
GeoObserverState continuous_observer_step(const GeoObserverState& s, const ImuSample& imu,
                                          const LandmarkObservation& obs,
                                          const LandmarkSet& landmarks, const Vec3& g, double dt);
/// Same step with the correction assembled in matrix form.
GeoObserverState continuous_observer_step_matrix_form(const GeoObserverState& s,
                                                      const ImuSample& imu,
                                                      const LandmarkObservation& obs,
                                                      const LandmarkSet& landmarks, const Vec3& g,
                                                      double dt);

/// Hybrid observer with a discrete attitude reset: open-loop flow,
/// R_sigma = cayley(2 k_R sigma_R) at each measurement.
GeoObserverState hybrid_discrete_attitude_flow(const GeoObserverState& s, const ImuSample& imu,
                                               const LandmarkSet& landmarks, const Vec3& g,
                                               double dt);
GeoObserverState hybrid_discrete_attitude_jump(const GeoObserverState& s,
                                               const LandmarkObservation& obs,
                                               const LandmarkSet& landmarks);

/// Hybrid observer with a continuous attitude correction: eta is held during
/// flow and reset to k_R sigma_R at each measurement; R_hat does not jump.
GeoObserverState hybrid_continuous_attitude_flow(const GeoObserverState& s, const ImuSample& imu,
                                                 const LandmarkSet& landmarks, const Vec3& g,
                                                 double dt);
GeoObserverState hybrid_continuous_attitude_jump(const GeoObserverState& s,
                                                 const LandmarkObservation& obs,
                                                 const LandmarkSet& landmarks);

// --- attitude gain defaults --------------------------------------------------

/// 0.9 / (tr M - lambda_min(M)), inside the discrete-reset contraction bound.
double default_discrete_attitude_gain(const ConstellationStats& stats);
/// 1 / (T_M lambda_max(M_bar)).
double default_continuous_attitude_gain(const ConstellationStats& stats, double T_M);

// --- fixed-gain certificate ------------------------------------------------

/// Phi(tau) = [[I, tau I], [0, I]].
Mat6 flow_transition(double tau);
/// I - K C with K = [k_p I; k_v I].
Mat6 jump_matrix(double k_p, double k_v);

struct FixedGainDesign {
  bool certified = false;
  Eigen::Matrix<double, 6, 3> K = Eigen::Matrix<double, 6, 3>::Zero();
  Mat6 P = Mat6::Zero();
  double tau_star = 0.0;
  double spectral_radius = 0.0;     // of A_d at tau_star
  double worst_eigenvalue = 0.0;    // max over the grid of lambda_max(A^T P A - P)
  double worst_tau = 0.0;
  std::string reason;               // empty when certified
};

/// Solves A_d^T P A_d - P = -I at the midpoint of [T_m, T_M] with
/// A_d = Phi(tau) (I - K C), then checks A^T P A - P < 0 on grid_size
/// evenly spaced points including both endpoints.
FixedGainDesign fixed_gain_design(double k_p, double k_v, double T_m, double T_M,
                                  int grid_size = 101);

}  // namespace navobs

#endif  // NAVOBS_GEOMETRIC_HPP
