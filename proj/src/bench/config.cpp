#include "navobs/bench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "navobs/errors.hpp"

namespace navobs::bench {

using nlohmann::json;

std::string to_string(ObserverKind k) {
  switch (k) {
    case ObserverKind::kMekf:
      return "mekf";
    case ObserverKind::kIekf:
      return "iekf";
    case ObserverKind::kContinuous:
      return "continuous";
    case ObserverKind::kHybridDiscrete:
      return "hybrid-discrete";
    case ObserverKind::kHybridContinuous:
      return "hybrid-continuous";
  }
  return "?";
}

std::string to_string(GainMode m) { return m == GainMode::kFixed ? "fixed" : "variable"; }

ObserverKind observer_kind_from_string(std::string_view s) {
  for (auto k : {ObserverKind::kMekf, ObserverKind::kIekf, ObserverKind::kContinuous,
                 ObserverKind::kHybridDiscrete, ObserverKind::kHybridContinuous}) {
    if (to_string(k) == s) {
      return k;
    }
  }
  throw ConfigError("unknown observer kind '" + std::string(s) + "'");
}

namespace {

// Walks one JSON object, remembers which keys were read and rejects the rest.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      fail("expected an object");
    }
  }

  ~Section() = default;

  bool has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (!j_.contains(key)) {
      return;
    }
    seen_.insert(key);
    out = convert<T>(j_.at(key), key);
  }

  template <typename T>
  void get(const std::string& key, std::optional<T>& out) {
    if (!j_.contains(key)) {
      return;
    }
    seen_.insert(key);
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    out = convert<T>(j_.at(key), key);
  }

  void get(const std::string& key, Vec3& out) {
    if (!j_.contains(key)) {
      return;
    }
    seen_.insert(key);
    out = vec3(j_.at(key), key);
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(j_.at(key), child_path(key));
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  Vec3 vec3(const json& v, const std::string& key) const {
    if (!v.is_array() || v.size() != 3) {
      fail_key(key, "expected an array of three numbers");
    }
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      out(i) = convert<double>(v[static_cast<std::size_t>(i)], key);
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) {
        fail_key(key, "unknown key");
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError((path_.empty() ? std::string("<root>") : path_) + ": " + msg);
  }
  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
    throw ConfigError(child_path(key) + ": " + msg);
  }

 private:
  template <typename T>
  T convert(const json& v, const std::string& key) const {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) {
        fail_key(key, "expected a number");
      }
      return v.get<double>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) {
        fail_key(key, "expected true or false");
      }
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) {
        fail_key(key, "expected an integer");
      }
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) {
          return v.get<T>();
        }
        if (v.get<long long>() < 0) {
          fail_key(key, "expected a non-negative integer");
        }
      }
      return v.get<T>();
    } else {
      if (!v.is_string()) {
        fail_key(key, "expected a string");
      }
      return v.get<std::string>();
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_trajectory(Section s, TrajectoryProfile& t) {
  std::string profile = t.name();
  s.get("profile", profile);
  try {
    t = TrajectoryProfile::from_name(profile);
  } catch (const InvalidArgument& e) {
    s.fail_key("profile", e.what());
  }
  s.get("position", t.position);
  s.get("yaw", t.yaw);
  s.get("radius", t.radius);
  s.get("rate", t.rate);
  s.get("altitude", t.altitude);
  s.get("amplitude_x", t.amplitude_x);
  s.get("amplitude_y", t.amplitude_y);
  s.get("yaw_amplitude", t.yaw_amplitude);
  s.get("roll_amplitude", t.roll_amplitude);
  s.finish();
}

void read_schedule(Section s, LandmarkSchedule& sched) {
  std::string kind = "fixed";
  s.get("kind", kind);
  if (kind == "fixed") {
    double rate = sched.rate_hz;
    s.get("rate", rate);
    sched = LandmarkSchedule::fixed(rate);
  } else if (kind == "jittered") {
    double t_m = sched.T_m;
    double t_big = sched.T_M;
    s.get("T_m", t_m);
    s.get("T_M", t_big);
    sched = LandmarkSchedule::jittered(t_m, t_big);
  } else {
    s.fail_key("kind", "expected 'fixed' or 'jittered'");
  }
  s.finish();
}

void read_scenario(Section s, Scenario& sc) {
  s.get("duration", sc.duration);
  s.get("imu_rate", sc.imu_rate);
  s.get("seed", sc.seed);
  s.get("gravity", sc.gravity);
  if (s.has("trajectory")) {
    read_trajectory(s.child("trajectory"), sc.trajectory);
  }
  if (s.has("landmark_schedule")) {
    read_schedule(s.child("landmark_schedule"), sc.schedule);
  }
  s.finish();
}

void read_landmarks(Section s, Scenario& sc) {
  std::vector<Vec3> positions;
  if (!s.has("positions")) {
    s.fail("missing key 'positions'");
  }
  const json& list = s.raw("positions");
  if (!list.is_array()) {
    s.fail_key("positions", "expected an array of [x, y, z]");
  }
  for (const auto& p : list) {
    positions.push_back(s.vec3(p, "positions"));
  }
  try {
    if (s.has("weights")) {
      const json& w = s.raw("weights");
      if (!w.is_array()) {
        s.fail_key("weights", "expected an array of numbers");
      }
      std::vector<double> weights;
      for (const auto& x : w) {
        if (!x.is_number()) {
          s.fail_key("weights", "expected an array of numbers");
        }
        weights.push_back(x.get<double>());
      }
      sc.landmarks = LandmarkSet(std::move(positions), std::move(weights));
    } else {
      sc.landmarks = LandmarkSet::uniform(std::move(positions));
    }
  } catch (const InvalidArgument& e) {
    s.fail(e.what());
  }
  s.finish();
}

void read_noise(Section s, NoiseSpec& n) {
  double sg = 0.0;
  double sa = 0.0;
  double sl = 0.0;
  s.get("gyro_sigma", sg);
  s.get("accel_sigma", sa);
  s.get("landmark_sigma", sl);
  if (sg < 0.0 || sa < 0.0 || sl < 0.0) {
    s.fail("standard deviations must be non-negative");
  }
  n = NoiseSpec::isotropic(sg, sa, sl);
  s.get("gyro_bias", n.gyro_bias);
  s.get("accel_bias", n.accel_bias);
  s.finish();
}

void read_tuning(Section s, Tuning& t) {
  s.get("gyro_psd", t.gyro_psd);
  s.get("accel_psd", t.accel_psd);
  s.get("landmark_cov", t.landmark_cov);
  s.get("landmark_psd", t.landmark_psd);
  s.get("p0_attitude", t.p0_attitude);
  s.get("p0_position", t.p0_position);
  s.get("p0_velocity", t.p0_velocity);
  s.get("epsilon", t.epsilon);
  s.finish();
}

void read_initial_error(Section s, InitialError& e) {
  s.get("attitude_deg", e.attitude_deg);
  s.get("attitude_axis", e.attitude_axis);
  s.get("position", e.position);
  s.get("position_dir", e.position_dir);
  s.get("velocity", e.velocity);
  s.get("velocity_dir", e.velocity_dir);
  for (const Vec3* d : {&e.attitude_axis, &e.position_dir, &e.velocity_dir}) {
    if (!(d->norm() > 0.0)) {
      s.fail("direction vectors must be non-zero");
    }
  }
  s.finish();
}

ObserverConfig read_observer(Section s, const Tuning& tuning_defaults,
                             const InitialError& init_defaults) {
  ObserverConfig o;
  o.tuning = tuning_defaults;
  o.init = init_defaults;
  std::string kind;
  if (!s.has("kind")) {
    s.fail("missing key 'kind'");
  }
  s.get("kind", kind);
  try {
    o.kind = observer_kind_from_string(kind);
  } catch (const ConfigError& e) {
    s.fail_key("kind", e.what());
  }
  std::string gains = "fixed";
  s.get("gains", gains);
  if (gains == "fixed") {
    o.gains = GainMode::kFixed;
  } else if (gains == "variable") {
    o.gains = GainMode::kVariable;
  } else {
    s.fail_key("gains", "expected 'fixed' or 'variable'");
  }
  o.name = to_string(o.kind) + (o.gains == GainMode::kVariable ? "-variable" : "");
  s.get("name", o.name);
  s.get("k_R", o.k_R);
  s.get("k_p", o.k_p);
  s.get("k_v", o.k_v);
  s.get("eta0", o.eta0);
  if (s.has("initial_error")) {
    read_initial_error(s.child("initial_error"), o.init);
  }
  if (s.has("tuning")) {
    read_tuning(s.child("tuning"), o.tuning);
  }
  s.finish();
  return o;
}

void read_thresholds(Section s, Thresholds& t) {
  s.get("final_attitude_rad", t.final_attitude_rad);
  s.get("final_position", t.final_position);
  s.get("final_velocity", t.final_velocity);
  s.get("rmse_attitude_deg", t.rmse_attitude_deg);
  s.get("rmse_position", t.rmse_position);
  s.get("rmse_velocity", t.rmse_velocity);
  s.finish();
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

ExperimentConfig ExperimentConfig::default_config() {
  ExperimentConfig cfg;
  for (auto k : {ObserverKind::kMekf, ObserverKind::kIekf, ObserverKind::kContinuous,
                 ObserverKind::kHybridDiscrete, ObserverKind::kHybridContinuous}) {
    ObserverConfig o;
    o.kind = k;
    o.name = to_string(k);
    cfg.observers.push_back(o);
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  if (observers.empty()) {
    throw ConfigError("observers: at least one observer is required");
  }
  std::set<std::string> names;
  for (const auto& o : observers) {
    if (o.name.empty() || o.name.find_first_of("/\\ ,") != std::string::npos) {
      throw ConfigError("observers: invalid name '" + o.name + "'");
    }
    if (!names.insert(o.name).second) {
      throw ConfigError("observers: duplicate name '" + o.name + "'");
    }
    if (o.gains == GainMode::kVariable &&
        (o.kind == ObserverKind::kMekf || o.kind == ObserverKind::kIekf)) {
      throw ConfigError("observers." + o.name + ": variable gains apply to geometric observers only");
    }
    for (const auto* g : {&o.k_R, &o.k_p, &o.k_v}) {
      if (g->has_value() && !(**g >= 0.0)) {
        throw ConfigError("observers." + o.name + ": gains must be non-negative");
      }
    }
    if (o.k_R.has_value() && !(*o.k_R > 0.0)) {
      throw ConfigError("observers." + o.name + ": k_R must be positive");
    }
    const Tuning& t = o.tuning;
    if (!(t.gyro_psd >= 0.0) || !(t.accel_psd >= 0.0) || !(t.landmark_cov > 0.0) ||
        !(t.p0_attitude > 0.0) || !(t.p0_position > 0.0) || !(t.p0_velocity > 0.0) ||
        (t.landmark_psd && !(*t.landmark_psd > 0.0)) || (t.epsilon && !(*t.epsilon > 0.0))) {
      throw ConfigError("observers." + o.name +
                        ": tuning needs positive landmark_cov, p0_* and non-negative PSDs");
    }
  }
  if (monte_carlo.runs < 1) {
    throw ConfigError("monte_carlo.runs must be at least 1");
  }
  if (monte_carlo.threads < 0) {
    throw ConfigError("monte_carlo.threads must be non-negative");
  }
  if (output.stride < 1) {
    throw ConfigError("output.stride must be at least 1");
  }
  try {
    scenario.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("syntax error at " + line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                      e.what());
  }
  ExperimentConfig cfg;
  cfg.observers.clear();
  Section s(root, "");
  if (s.has("scenario")) {
    read_scenario(s.child("scenario"), cfg.scenario);
  }
  if (s.has("landmarks")) {
    read_landmarks(s.child("landmarks"), cfg.scenario);
  }
  if (s.has("noise")) {
    read_noise(s.child("noise"), cfg.scenario.noise);
  }
  Tuning tuning;
  if (s.has("tuning")) {
    read_tuning(s.child("tuning"), tuning);
  }
  InitialError init;
  if (s.has("initial_error")) {
    read_initial_error(s.child("initial_error"), init);
  }
  if (!s.has("observers")) {
    s.fail("missing key 'observers'");
  }
  const json& obs = s.raw("observers");
  if (!obs.is_array()) {
    s.fail_key("observers", "expected an array");
  }
  for (std::size_t i = 0; i < obs.size(); ++i) {
    cfg.observers.push_back(
        read_observer(Section(obs[i], "observers[" + std::to_string(i) + "]"), tuning, init));
  }
  if (s.has("monte_carlo")) {
    Section m = s.child("monte_carlo");
    m.get("runs", cfg.monte_carlo.runs);
    m.get("seed_stride", cfg.monte_carlo.seed_stride);
    m.get("threads", cfg.monte_carlo.threads);
    m.finish();
  }
  if (s.has("output")) {
    Section o = s.child("output");
    std::string dir = cfg.output.dir.string();
    o.get("dir", dir);
    cfg.output.dir = dir;
    o.get("stride", cfg.output.stride);
    o.finish();
  }
  if (s.has("metrics")) {
    Section m = s.child("metrics");
    m.get("steady_state_start", cfg.metrics.steady_state_start);
    m.get("fit_end", cfg.metrics.fit_end);
    if (m.has("thresholds")) {
      read_thresholds(m.child("thresholds"), cfg.metrics.thresholds);
    }
    m.finish();
  }
  s.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read config '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace navobs::bench
