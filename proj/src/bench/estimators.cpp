#include "navobs/bench/estimators.hpp"

#include <Eigen/Eigenvalues>

namespace navobs::bench {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

Mat6 imu_psd(const Tuning& t) {
  return imu_noise_matrix(t.gyro_psd * Mat3::Identity(), t.accel_psd * Mat3::Identity());
}

template <int N>
Eigen::VectorXd eigenvalues_of(const Covariance<double, N>& p) {
  return p.eigenvalues();
}

class MekfEstimator final : public Estimator {
 public:
  MekfEstimator(const ObserverConfig& cfg, const Scenario& sc, const Pose& initial)
      : s_{initial, initial_covariance(cfg.tuning)},
        landmarks_(sc.landmarks),
        g_(sc.gravity),
        v_(imu_psd(cfg.tuning)),
        q_(cfg.tuning.landmark_cov * Mat3::Identity()) {}

  void measure(const LandmarkObservation& obs) override { s_ = mekf_update(s_, obs, landmarks_, q_); }
  void propagate(const ImuSample& imu, const LandmarkObservation&, double dt) override {
    s_ = mekf_predict(s_, imu, g_, v_, dt);
  }
  const Pose& estimate() const override { return s_.est; }
  std::optional<Eigen::VectorXd> covariance_eigenvalues() const override {
    return eigenvalues_of(s_.P);
  }
  std::optional<double> covariance_trace() const override { return s_.P.trace(); }

 private:
  static Cov9 initial_covariance(const Tuning& t) {
    Eigen::Matrix<double, 9, 1> d;
    d << Vec3::Constant(t.p0_attitude), Vec3::Constant(t.p0_position), Vec3::Constant(t.p0_velocity);
    return Cov9(d.asDiagonal().toDenseMatrix());
  }

  MekfState s_;
  LandmarkSet landmarks_;
  Vec3 g_;
  Mat6 v_;
  Mat3 q_;
};

class IekfEstimator final : public Estimator {
 public:
  IekfEstimator(const ObserverConfig& cfg, const Scenario& sc, const Pose& initial)
      : s_{initial, initial_covariance(cfg.tuning)},
        landmarks_(sc.landmarks),
        g_(sc.gravity),
        v_(imu_psd(cfg.tuning)),
        q_(cfg.tuning.landmark_cov * Mat3::Identity()) {}

  void measure(const LandmarkObservation& obs) override { s_ = iekf_update(s_, obs, landmarks_, q_); }
  void propagate(const ImuSample& imu, const LandmarkObservation&, double dt) override {
    s_ = iekf_predict(s_, imu, g_, v_, dt);
  }
  const Pose& estimate() const override { return s_.est; }
  std::optional<Eigen::VectorXd> covariance_eigenvalues() const override {
    return eigenvalues_of(s_.P);
  }
  std::optional<double> covariance_trace() const override { return s_.P.trace(); }

 private:
  static Cov9 initial_covariance(const Tuning& t) {
    Eigen::Matrix<double, 9, 1> d;
    d << Vec3::Constant(t.p0_attitude), Vec3::Constant(t.p0_velocity), Vec3::Constant(t.p0_position);
    return Cov9(d.asDiagonal().toDenseMatrix());
  }

  IekfState s_;
  LandmarkSet landmarks_;
  Vec3 g_;
  Mat6 v_;
  Mat3 q_;
};

class GeometricEstimator final : public Estimator {
 public:
  GeometricEstimator(const ObserverConfig& cfg, const Scenario& sc, const Pose& initial)
      : kind_(cfg.kind), landmarks_(sc.landmarks), g_(sc.gravity) {
    s_.est = initial;
    s_.eta = cfg.eta0;
    s_.gains = resolve_gains(cfg, sc);
    if (cfg.gains == GainMode::kVariable) {
      VariableGainTuning t;
      t.v_bar = imu_psd(cfg.tuning);
      if (kind_ == ObserverKind::kContinuous) {
        t.q_bar = cfg.tuning.landmark_psd.value_or(cfg.tuning.landmark_cov / sc.imu_rate) *
                  Mat3::Identity();
      } else {
        t.q_bar = cfg.tuning.landmark_cov * Mat3::Identity();
      }
      t.epsilon = cfg.tuning.epsilon.value_or(default_epsilon(t.v_bar));
      Eigen::Matrix<double, 6, 1> d;
      d << Vec3::Constant(cfg.tuning.p0_position), Vec3::Constant(cfg.tuning.p0_velocity);
      s_.riccati = RiccatiGain{Cov6(d.asDiagonal().toDenseMatrix()), t};
    }
  }

  void measure(const LandmarkObservation& obs) override {
    switch (kind_) {
      case ObserverKind::kHybridDiscrete:
        s_ = hybrid_discrete_attitude_jump(s_, obs, landmarks_);
        break;
      case ObserverKind::kHybridContinuous:
        s_ = hybrid_continuous_attitude_jump(s_, obs, landmarks_);
        break;
      default:
        break;
    }
  }

  void propagate(const ImuSample& imu, const LandmarkObservation& dense, double dt) override {
    switch (kind_) {
      case ObserverKind::kContinuous:
        s_ = continuous_observer_step(s_, imu, dense, landmarks_, g_, dt);
        break;
      case ObserverKind::kHybridDiscrete:
        s_ = hybrid_discrete_attitude_flow(s_, imu, landmarks_, g_, dt);
        break;
      default:
        s_ = hybrid_continuous_attitude_flow(s_, imu, landmarks_, g_, dt);
        break;
    }
  }

  const Pose& estimate() const override { return s_.est; }
  std::optional<Eigen::VectorXd> covariance_eigenvalues() const override {
    if (!s_.riccati) {
      return std::nullopt;
    }
    return eigenvalues_of(s_.riccati->P);
  }
  std::optional<double> covariance_trace() const override {
    if (!s_.riccati) {
      return std::nullopt;
    }
    return s_.riccati->P.trace();
  }

 private:
  ObserverKind kind_;
  GeoObserverState s_;
  LandmarkSet landmarks_;
  Vec3 g_;
};

}  // namespace

Pose perturb(const Pose& truth, const InitialError& e) {
  Pose est;
  const Rot r_err = exp_so3(Vec3(e.attitude_axis.normalized() * (e.attitude_deg * kDegToRad)));
  est.R = r_err.inverse() * truth.R;
  est.p = truth.p + e.position * e.position_dir.normalized();
  est.v = truth.v + e.velocity * e.velocity_dir.normalized();
  return est;
}

Gains resolve_gains(const ObserverConfig& cfg, const Scenario& sc) {
  const ConstellationStats stats = constellation_stats(sc.landmarks);
  double k_r = 1.0;
  double k_p = 0.5;
  double k_v = 0.3;
  switch (cfg.kind) {
    case ObserverKind::kContinuous:
      k_r = 0.2;
      k_p = 2.0;
      k_v = 1.0;
      break;
    case ObserverKind::kHybridDiscrete:
      k_r = default_discrete_attitude_gain(stats);
      break;
    case ObserverKind::kHybridContinuous:
      k_r = default_continuous_attitude_gain(stats, sc.gap_bounds().second);
      break;
    default:
      break;
  }
  return Gains::isotropic(cfg.k_R.value_or(k_r), cfg.k_p.value_or(k_p), cfg.k_v.value_or(k_v));
}

std::unique_ptr<Estimator> make_estimator(const ObserverConfig& cfg, const Scenario& sc,
                                          const Pose& initial) {
  switch (cfg.kind) {
    case ObserverKind::kMekf:
      return std::make_unique<MekfEstimator>(cfg, sc, initial);
    case ObserverKind::kIekf:
      return std::make_unique<IekfEstimator>(cfg, sc, initial);
    default:
      return std::make_unique<GeometricEstimator>(cfg, sc, initial);
  }
}

}  // namespace navobs::bench
