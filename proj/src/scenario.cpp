#include "navobs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "navobs/csv.hpp"

namespace navobs {

namespace {

constexpr std::uint64_t kStreamImu = 1;
constexpr std::uint64_t kStreamLandmarks = 2;
constexpr std::uint64_t kStreamSchedule = 3;
constexpr std::uint64_t kStreamDense = 4;

Mat3 rot_z(double a) {
  Mat3 r;
  r << std::cos(a), -std::sin(a), 0.0,
       std::sin(a), std::cos(a), 0.0,
       0.0, 0.0, 1.0;
  return r;
}

Mat3 rot_x(double a) {
  Mat3 r;
  r << 1.0, 0.0, 0.0,
       0.0, std::cos(a), -std::sin(a),
       0.0, std::sin(a), std::cos(a);
  return r;
}

}  // namespace

TrajectoryProfile TrajectoryProfile::from_name(std::string_view name) {
  TrajectoryProfile p;
  if (name == "static") {
    p.kind = ProfileKind::kStatic;
  } else if (name == "circle") {
    p.kind = ProfileKind::kCircle;
  } else if (name == "figure8") {
    p.kind = ProfileKind::kFigure8;
  } else {
    throw UnknownProfile("unknown trajectory profile '" + std::string(name) + "'");
  }
  return p;
}

std::string TrajectoryProfile::name() const {
  switch (kind) {
    case ProfileKind::kStatic:
      return "static";
    case ProfileKind::kCircle:
      return "circle";
    case ProfileKind::kFigure8:
      return "figure8";
  }
  return "unknown";
}

double TrajectoryProfile::period() const {
  if (kind == ProfileKind::kStatic || rate == 0.0) {
    return 0.0;
  }
  return 2.0 * std::numbers::pi / std::abs(rate);
}

TrajectoryPoint generate_trajectory(const TrajectoryProfile& profile, double t, const Vec3& g) {
  Mat3 r = Mat3::Identity();
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 v_dot = Vec3::Zero();
  Vec3 omega = Vec3::Zero();

  switch (profile.kind) {
    case ProfileKind::kStatic: {
      r = rot_z(profile.yaw);
      p = profile.position;
      break;
    }
    case ProfileKind::kCircle: {
      const double w = profile.rate;
      const double rad = profile.radius;
      const double c = std::cos(w * t);
      const double s = std::sin(w * t);
      p = Vec3(rad * c, rad * s, profile.altitude);
      v = Vec3(-rad * w * s, rad * w * c, 0.0);
      v_dot = Vec3(-rad * w * w * c, -rad * w * w * s, 0.0);
      r = rot_z(w * t + std::numbers::pi / 2.0);
      omega = Vec3(0.0, 0.0, w);
      break;
    }
    case ProfileKind::kFigure8: {
      const double w = profile.rate;
      const double s1 = std::sin(w * t);
      const double c1 = std::cos(w * t);
      const double s2 = std::sin(2.0 * w * t);
      const double c2 = std::cos(2.0 * w * t);
      p = Vec3(profile.amplitude_x * s1, profile.amplitude_y * s2, profile.altitude);
      v = Vec3(profile.amplitude_x * w * c1, 2.0 * profile.amplitude_y * w * c2, 0.0);
      v_dot = Vec3(-profile.amplitude_x * w * w * s1, -4.0 * profile.amplitude_y * w * w * s2, 0.0);
      const double yaw = profile.yaw_amplitude * s1;
      const double yaw_dot = profile.yaw_amplitude * w * c1;
      const double roll = profile.roll_amplitude * s2;
      const double roll_dot = 2.0 * profile.roll_amplitude * w * c2;
      const Mat3 rx = rot_x(roll);
      r = rot_z(yaw) * rx;
      // R^T R_dot = Rx^T (yaw_dot e_z)^ Rx + (roll_dot e_x)^
      omega = rx.transpose() * Vec3::UnitZ() * yaw_dot + Vec3::UnitX() * roll_dot;
      break;
    }
  }

  TrajectoryPoint pt{Pose{Rot(r), v, p}, omega, r.transpose() * (v_dot - g), v_dot};
  return pt;
}

TrueState integrate_true(const TrueState& s, const Vec3& omega, const Vec3& a, const Vec3& g,
                         double dt) {
  if (!(dt > 0.0)) {
    throw InvalidArgument("integrate_true: dt must be positive");
  }
  const Rot& r = s.X.R;
  const Rot r_mid = r * exp_so3(Vec3(omega * (dt / 2.0)));
  const Vec3 acc = g + r_mid * a;
  TrueState out;
  out.X.R = r * exp_so3(Vec3(omega * dt));
  out.X.p = s.X.p + s.X.v * dt + acc * (dt * dt / 2.0);
  out.X.v = s.X.v + acc * dt;
  out.t = s.t + dt;
  return out;
}

LandmarkSchedule LandmarkSchedule::fixed(double rate_hz) {
  LandmarkSchedule s;
  s.kind = Kind::kFixedRate;
  s.rate_hz = rate_hz;
  s.T_m = s.T_M = 1.0 / rate_hz;
  return s;
}

LandmarkSchedule LandmarkSchedule::jittered(double T_m, double T_M) {
  LandmarkSchedule s;
  s.kind = Kind::kJittered;
  s.T_m = T_m;
  s.T_M = T_M;
  return s;
}

LandmarkSet Scenario::default_landmarks() {
  // Regular tetrahedron with edge 10 m centred at the origin.
  const double h = 10.0 / (2.0 * std::sqrt(2.0));
  return LandmarkSet({Vec3(h, h, h), Vec3(h, -h, -h), Vec3(-h, h, -h), Vec3(-h, -h, h)},
                     {0.4, 0.3, 0.2, 0.1});
}

Scenario Scenario::default_scenario() {
  Scenario sc;
  sc.duration = 60.0;
  sc.imu_rate = 200.0;
  sc.schedule = LandmarkSchedule::fixed(10.0);
  sc.trajectory = TrajectoryProfile::from_name("circle");
  sc.landmarks = default_landmarks();
  sc.noise = NoiseSpec::none();
  return sc;
}

std::size_t Scenario::imu_count() const {
  return static_cast<std::size_t>(std::llround(duration * imu_rate)) + 1;
}

std::pair<long, long> Scenario::gap_steps() const {
  if (!(imu_rate > 0.0)) {
    throw InvalidArgument("scenario: imu_rate must be positive");
  }
  long lo = 0;
  long hi = 0;
  if (schedule.kind == LandmarkSchedule::Kind::kFixedRate) {
    if (!(schedule.rate_hz > 0.0)) {
      throw InvalidArgument("scenario: landmark rate must be positive");
    }
    lo = hi = std::lround(imu_rate / schedule.rate_hz);
  } else {
    if (!(schedule.T_m > 0.0) || !(schedule.T_m <= schedule.T_M) || !std::isfinite(schedule.T_M)) {
      throw InvalidArgument("scenario: landmark gaps need 0 < T_m <= T_M < inf");
    }
    lo = static_cast<long>(std::ceil(schedule.T_m * imu_rate - 1e-9));
    hi = static_cast<long>(std::floor(schedule.T_M * imu_rate + 1e-9));
  }
  if (lo < 2) {
    throw InvalidArgument("scenario: need at least two IMU steps between landmark epochs");
  }
  if (hi < lo) {
    throw InvalidArgument("scenario: [T_m, T_M] contains no gap on the IMU grid");
  }
  return {lo, hi};
}

std::pair<double, double> Scenario::gap_bounds() const {
  const auto [lo, hi] = gap_steps();
  return {static_cast<double>(lo) / imu_rate, static_cast<double>(hi) / imu_rate};
}

void Scenario::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw InvalidArgument("scenario: duration must be positive");
  }
  (void)gap_steps();
  if (landmarks.size() == 0) {
    throw InvalidArgument("scenario: no landmarks");
  }
  if (!gravity.allFinite()) {
    throw InvalidArgument("scenario: gravity must be finite");
  }
  noise.validate();
}

bool SimLog::is_landmark_epoch(std::size_t imu_index) const {
  // landmark_index is sorted.
  auto it = std::lower_bound(landmark_index.begin(), landmark_index.end(), imu_index);
  return it != landmark_index.end() && *it == imu_index;
}

SimLog run_scenario(const Scenario& sc) {
  sc.validate();
  const auto [lo, hi] = sc.gap_steps();
  const std::size_t n = sc.imu_count();

  CounterRng imu_rng(sc.seed, kStreamImu);
  CounterRng lm_rng(sc.seed, kStreamLandmarks);
  CounterRng sched_rng(sc.seed, kStreamSchedule);
  CounterRng dense_rng(sc.seed, kStreamDense);

  SimLog log;
  log.truth.reserve(n);
  log.imu.reserve(n);
  log.dense_landmarks.reserve(n);

  auto next_gap = [&, lo = lo, hi = hi]() -> std::size_t {
    if (lo == hi) {
      return static_cast<std::size_t>(lo);
    }
    const auto span = static_cast<double>(hi - lo + 1);
    const auto k = static_cast<long>(std::floor(sched_rng.uniform() * span));
    return static_cast<std::size_t>(lo + std::min(k, hi - lo));
  };

  std::size_t next_epoch = next_gap();
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) / sc.imu_rate;
    const TrajectoryPoint pt = generate_trajectory(sc.trajectory, t, sc.gravity);
    const TrueState s{pt.X, t};
    log.truth.push_back(s);
    log.imu.push_back(measure_imu(s, pt.omega, pt.a, sc.noise, imu_rng));
    log.dense_landmarks.push_back(measure_landmarks(s, sc.landmarks, sc.noise, dense_rng));
    if (j == next_epoch) {
      log.landmarks.push_back(measure_landmarks(s, sc.landmarks, sc.noise, lm_rng));
      log.landmark_index.push_back(j);
      next_epoch += next_gap();
    }
  }
  return log;
}

namespace {

std::vector<std::string> trajectory_header() {
  return {"t",   "R00", "R01", "R02", "R10", "R11", "R12", "R20", "R21", "R22",
          "v_x", "v_y", "v_z", "p_x", "p_y", "p_z", "omega_m_x", "omega_m_y", "omega_m_z",
          "a_m_x", "a_m_y", "a_m_z"};
}

std::vector<std::string> landmark_header() {
  return {"epoch", "imu_index", "t", "landmark_id", "y_x", "y_y", "y_z"};
}

void write_landmarks(const std::filesystem::path& path,
                     const std::vector<LandmarkObservation>& obs,
                     const std::vector<std::size_t>& index) {
  csv::Writer w(path, landmark_header());
  for (std::size_t k = 0; k < obs.size(); ++k) {
    for (std::size_t i = 0; i < obs[k].y.size(); ++i) {
      const Vec3& y = obs[k].y[i];
      w << k << index[k] << obs[k].t << i << y.x() << y.y() << y.z();
      w.end_row();
    }
  }
}

void read_landmarks(const std::filesystem::path& path, std::vector<LandmarkObservation>& obs,
                    std::vector<std::size_t>& index) {
  const csv::Table t = csv::read(path);
  const std::size_t c_epoch = t.column("epoch");
  const std::size_t c_imu = t.column("imu_index");
  const std::size_t c_t = t.column("t");
  const std::size_t c_id = t.column("landmark_id");
  const std::size_t c_y = t.column("y_x");
  for (const auto& row : t.rows) {
    const auto k = static_cast<std::size_t>(csv::parse_int(row[c_epoch]));
    const auto id = static_cast<std::size_t>(csv::parse_int(row[c_id]));
    if (k == obs.size()) {
      obs.push_back(LandmarkObservation{csv::parse_double(row[c_t]), {}});
      index.push_back(static_cast<std::size_t>(csv::parse_int(row[c_imu])));
    }
    if (k + 1 != obs.size() || id != obs.back().y.size()) {
      throw InvalidArgument("simlog: landmark rows out of order in '" + path.string() + "'");
    }
    obs.back().y.emplace_back(csv::parse_double(row[c_y]), csv::parse_double(row[c_y + 1]),
                              csv::parse_double(row[c_y + 2]));
  }
}

}  // namespace

void write_simlog_csv(const SimLog& log, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    csv::Writer w(dir / "trajectory.csv", trajectory_header());
    for (std::size_t j = 0; j < log.truth.size(); ++j) {
      const TrueState& s = log.truth[j];
      const ImuSample& m = log.imu[j];
      w << s.t;
      const Mat3& r = s.X.R.matrix();
      for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 3; ++col) {
          w << r(row, col);
        }
      }
      w << s.X.v.x() << s.X.v.y() << s.X.v.z() << s.X.p.x() << s.X.p.y() << s.X.p.z();
      w << m.omega_m.x() << m.omega_m.y() << m.omega_m.z() << m.a_m.x() << m.a_m.y()
        << m.a_m.z();
      w.end_row();
    }
  }
  write_landmarks(dir / "landmarks.csv", log.landmarks, log.landmark_index);
  std::vector<std::size_t> dense_index(log.dense_landmarks.size());
  for (std::size_t j = 0; j < dense_index.size(); ++j) {
    dense_index[j] = j;
  }
  write_landmarks(dir / "landmarks_dense.csv", log.dense_landmarks, dense_index);
}

SimLog read_simlog_csv(const std::filesystem::path& dir) {
  SimLog log;
  const csv::Table t = csv::read(dir / "trajectory.csv");
  const auto header = trajectory_header();
  if (t.header != header) {
    throw InvalidArgument("simlog: unexpected trajectory.csv header");
  }
  for (const auto& row : t.rows) {
    double f[22];
    for (int i = 0; i < 22; ++i) {
      f[i] = csv::parse_double(row[static_cast<std::size_t>(i)]);
    }
    Mat3 r;
    r << f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8], f[9];
    TrueState s{Pose{Rot(r), Vec3(f[10], f[11], f[12]), Vec3(f[13], f[14], f[15])}, f[0]};
    log.truth.push_back(s);
    log.imu.push_back(ImuSample{f[0], Vec3(f[16], f[17], f[18]), Vec3(f[19], f[20], f[21])});
  }
  read_landmarks(dir / "landmarks.csv", log.landmarks, log.landmark_index);
  std::vector<std::size_t> dense_index;
  read_landmarks(dir / "landmarks_dense.csv", log.dense_landmarks, dense_index);
  return log;
}

}  // namespace navobs
