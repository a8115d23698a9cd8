#ifndef NAVOBS_BENCH_CONFIG_HPP
#define NAVOBS_BENCH_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "navobs/scenario.hpp"

namespace navobs::bench {

enum class ObserverKind { kMekf, kIekf, kContinuous, kHybridDiscrete, kHybridContinuous };
enum class GainMode { kFixed, kVariable };

std::string to_string(ObserverKind k);
std::string to_string(GainMode m);
/// "mekf", "iekf", "continuous", "hybrid-discrete", "hybrid-continuous".
ObserverKind observer_kind_from_string(std::string_view s);

/// Initial estimate relative to the truth at t = 0:
/// R~(0) = exp(attitude_deg * axis), p_hat = p + position * position_dir,
/// v_hat = v + velocity * velocity_dir. Directions are normalized.
struct InitialError {
  double attitude_deg = 10.0;
  Vec3 attitude_axis = Vec3(1.0, 2.0, 3.0).normalized();
  double position = 1.0;
  Vec3 position_dir = Vec3(1.0, -1.0, 1.0).normalized();
  double velocity = 1.0;
  Vec3 velocity_dir = Vec3(-1.0, 1.0, 1.0).normalized();
};

/// Filter and Riccati tuning. Independent of the simulated noise so that
/// noise-free runs still have well-posed covariances.
struct Tuning {
  double gyro_psd = 5e-7;      // (rad/s)^2 / Hz
  double accel_psd = 5e-5;     // (m/s^2)^2 / Hz
  double landmark_cov = 2.5e-3;  // m^2, per landmark and axis
  std::optional<double> landmark_psd;  // m^2 s; defaults to landmark_cov / imu_rate
  double p0_attitude = 0.05;   // rad^2
  double p0_position = 1.0;    // m^2
  double p0_velocity = 1.0;    // (m/s)^2
  std::optional<double> epsilon;
};

struct ObserverConfig {
  std::string name;
  ObserverKind kind = ObserverKind::kMekf;
  GainMode gains = GainMode::kFixed;
  std::optional<double> k_R;  // defaults depend on kind and constellation
  std::optional<double> k_p;
  std::optional<double> k_v;
  Vec3 eta0 = Vec3::Zero();
  InitialError init;
  Tuning tuning;
};

struct MonteCarlo {
  int runs = 1;
  std::uint64_t seed_stride = 1;
  int threads = 0;  // 0: hardware concurrency
};

struct OutputConfig {
  std::filesystem::path dir = "out";
  int stride = 1;  // record every stride-th IMU epoch (the last one always)
};

struct Thresholds {
  std::optional<double> final_attitude_rad;
  std::optional<double> final_position;
  std::optional<double> final_velocity;
  std::optional<double> rmse_attitude_deg;
  std::optional<double> rmse_position;
  std::optional<double> rmse_velocity;
};

struct MetricsConfig {
  double steady_state_start = 30.0;  // RMSE uses t >= this
  double fit_end = 30.0;             // log-slope fits use t <= this
  Thresholds thresholds;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::default_scenario();
  std::vector<ObserverConfig> observers;
  MonteCarlo monte_carlo;
  OutputConfig output;
  MetricsConfig metrics;

  /// Five observers with default gains, noise-free default scenario.
  static ExperimentConfig default_config();
  void validate() const;
};

/// Parses JSON text. Throws ConfigError with "line:column" for syntax
/// errors and the offending key path for schema errors. Unknown keys are
/// rejected.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace navobs::bench

#endif  // NAVOBS_BENCH_CONFIG_HPP
