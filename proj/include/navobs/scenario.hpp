#ifndef NAVOBS_SCENARIO_HPP
#define NAVOBS_SCENARIO_HPP

// Analytic ground-truth trajectories, the truth integrator and multirate
// sensor streams.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "navobs/world.hpp"

namespace navobs {

enum class ProfileKind { kStatic, kCircle, kFigure8 };

/// Closed-form trajectory. Position and attitude are analytic functions of
/// time; omega and a are their exact derivatives, so sampled truth has no
/// integration drift.
struct TrajectoryProfile {
  ProfileKind kind = ProfileKind::kCircle;

  // static: fixed pose
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;

  // circle: radius, angular rate, altitude; heading follows the velocity
  double radius = 5.0;
  double rate = 0.2;
  double altitude = 2.0;

  // figure8: p = (ax sin(rate t), ay sin(2 rate t), altitude),
  // R = Rz(yaw_amp sin(rate t)) Rx(roll_amp sin(2 rate t))
  double amplitude_x = 5.0;
  double amplitude_y = 3.0;
  double yaw_amplitude = 0.3;
  double roll_amplitude = 0.1;

  /// "static", "circle" or "figure8" with default parameters. Throws UnknownProfile.
  static TrajectoryProfile from_name(std::string_view name);
  std::string name() const;
  double period() const;
};

struct TrajectoryPoint {
  Pose X;
  Vec3 omega;  // body angular rate
  Vec3 a;      // specific force R^T (v_dot - g)
  Vec3 v_dot;
};

TrajectoryPoint generate_trajectory(const TrajectoryProfile& profile, double t, const Vec3& g);

/// One step of the truth kinematics with (omega, a) held over dt:
/// R+ = R exp(omega dt), acc = g + R_mid a with R_mid = R exp(omega dt / 2),
/// p+ = p + v dt + acc dt^2 / 2, v+ = v + acc dt. No re-orthonormalization.
TrueState integrate_true(const TrueState& s, const Vec3& omega, const Vec3& a, const Vec3& g,
                         double dt);

/// Landmark epochs: either every round(imu_rate / rate) IMU steps, or gaps
/// drawn uniformly on the IMU grid within [T_m, T_M].
struct LandmarkSchedule {
  enum class Kind { kFixedRate, kJittered };
  Kind kind = Kind::kFixedRate;
  double rate_hz = 10.0;
  double T_m = 0.1;
  double T_M = 0.1;

  static LandmarkSchedule fixed(double rate_hz);
  static LandmarkSchedule jittered(double T_m, double T_M);
};

struct Scenario {
  double duration = 60.0;
  double imu_rate = 200.0;
  LandmarkSchedule schedule = LandmarkSchedule::fixed(10.0);
  TrajectoryProfile trajectory;
  LandmarkSet landmarks;
  NoiseSpec noise;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  std::uint64_t seed = 1;

  /// Circle r = 5 m at 0.2 rad/s, 200 Hz IMU, 10 Hz landmarks, regular
  /// tetrahedron of edge 10 m with weights (0.4, 0.3, 0.2, 0.1), no noise.
  static Scenario default_scenario();
  static LandmarkSet default_landmarks();

  double dt() const { return 1.0 / imu_rate; }
  std::size_t imu_count() const;
  /// Inclusive range of landmark gaps in IMU steps. Throws InvalidArgument
  /// when the bounds admit no gap on the IMU grid.
  std::pair<long, long> gap_steps() const;
  /// Effective (T_m, T_M) on the IMU grid.
  std::pair<double, double> gap_bounds() const;
  /// Throws InvalidArgument on violated invariants.
  void validate() const;
};

struct SimLog {
  std::vector<TrueState> truth;  // one per IMU epoch
  std::vector<ImuSample> imu;    // one per IMU epoch
  std::vector<LandmarkObservation> landmarks;  // intermittent epochs t_k
  std::vector<std::size_t> landmark_index;     // IMU index of each t_k
  std::vector<LandmarkObservation> dense_landmarks;  // every IMU epoch

  bool is_landmark_epoch(std::size_t imu_index) const;
};

/// Deterministic in sc (including seed). IMU noise, landmark noise, jitter
/// and dense landmark noise use separate RNG streams.
SimLog run_scenario(const Scenario& sc);

/// Writes trajectory.csv, landmarks.csv and landmarks_dense.csv into dir.
void write_simlog_csv(const SimLog& log, const std::filesystem::path& dir);
SimLog read_simlog_csv(const std::filesystem::path& dir);

}  // namespace navobs

#endif  // NAVOBS_SCENARIO_HPP
