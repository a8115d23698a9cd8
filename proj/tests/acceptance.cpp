// Acceptance driver: one PASS/FAIL line per criterion. The first argument is
// the path to the navobs CLI (used by the two-process determinism check).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "navobs/bench/experiment.hpp"
#include "navobs/geometric.hpp"
#include "navobs/kalman.hpp"
#include "navobs/riccati.hpp"
#include "navobs/scenario.hpp"
#include "test_support.hpp"

using namespace navobs;
using namespace navobs::bench;
using navobs::oracle::Random;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0.0 && elapsed > budget_s) {
    v.pass = false;
    v.detail << " [runtime " << elapsed << " s over budget " << budget_s << " s]";
  }
  failures += v.pass ? 0 : 1;
  std::printf("criterion %2d: %s  %s (%.2f s):%s\n", id, v.pass ? "PASS" : "FAIL", title.c_str(),
              elapsed, v.detail.str().c_str());
  std::fflush(stdout);
}

LandmarkObservation observe(const Pose& x, const LandmarkSet& landmarks) {
  LandmarkObservation obs;
  for (const auto& p : landmarks.positions()) {
    obs.y.push_back(x.R.matrix().transpose() * (p - x.p));
  }
  return obs;
}

Vec3 psi_oracle(const Mat3& a) {
  const Mat3 s = 0.5 * (a - a.transpose());
  return Vec3(s(2, 1), s(0, 2), s(1, 0));
}

bool symmetric_pd(const Eigen::MatrixXd& p) {
  return (p - p.transpose()).norm() <= 1e-9 * std::max(1.0, p.norm()) &&
         Eigen::LLT<Eigen::MatrixXd>(p).info() == Eigen::Success &&
         Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(p).eigenvalues()(0) > 0.0;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// --- criteria ----------------------------------------------------------------

void lie_kernel(Verdict& v) {
  Random rng(101);
  double worst_exp = 0.0, worst_se23 = 0.0, worst_cayley = 0.0, worst_log = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 theta = rng.rotation_vector(oracle::kPi);
    const Mat3 series = oracle::series_exp<3>(Mat3(hat3(theta)));
    worst_exp = std::max(worst_exp, (exp_so3(theta).matrix() - series).norm());

    Tangent9 xi;
    xi.theta = theta;
    xi.alpha = rng.vec3();
    xi.nu = rng.vec3();
    worst_se23 = std::max(worst_se23, (exp_se23(xi).embed() - oracle::series_exp<5>(xi.hat())).norm());

    const Vec3 sigma = rng.vec3(rng.uniform(0.0, 2.0));
    const Mat3 s = hat3(sigma);
    const Mat3 classical = (Mat3::Identity() + s) * (Mat3::Identity() - s).inverse();
    worst_cayley = std::max(worst_cayley, (cayley(sigma).matrix() - classical).norm());

    const Vec3 t2 = rng.rotation_vector(oracle::kPi * (1.0 - 1e-6));
    worst_log = std::max(worst_log, (log_so3(exp_so3(t2)) - t2).norm());
  }
  v.detail << " exp_so3 " << worst_exp << ", exp_se23 " << worst_se23 << ", cayley " << worst_cayley
           << ", log(exp) " << worst_log;
  v.require(worst_exp <= 1e-10, "exp_so3 vs series");
  v.require(worst_se23 <= 1e-10, "exp_se23 vs series");
  v.require(worst_cayley <= 1e-10, "cayley vs (I+S)(I-S)^-1");
  v.require(worst_log <= 1e-9, "log/exp round trip");
}

void decoupling(Verdict& v) {
  Scenario sc = Scenario::default_scenario();
  sc.duration = 20.0;
  const SimLog log = run_scenario(sc);
  Random rng(102);
  const Vec3 theta0(0.15, -0.1, 0.12);
  std::vector<std::vector<Mat3>> series;
  for (int run = 0; run < 5; ++run) {
    GeoObserverState s;
    s.est = log.truth[0].X;
    s.est.R = exp_so3(theta0) * s.est.R;
    s.est.p += rng.vec3(2.0);
    s.est.v += rng.vec3(1.0);
    s.gains = Gains::isotropic(0.2, rng.uniform(0.5, 4.0), rng.uniform(0.1, 3.0));
    std::vector<Mat3> r_err;
    for (std::size_t j = 0; j + 1 < log.imu.size(); ++j) {
      r_err.push_back(log.truth[j].X.R.matrix() * s.est.R.matrix().transpose());
      s = continuous_observer_step(s, log.imu[j], log.dense_landmarks[j], sc.landmarks, sc.gravity, sc.dt());
    }
    series.push_back(std::move(r_err));
  }
  double worst = 0.0;
  for (int run = 1; run < 5; ++run) {
    for (std::size_t j = 0; j < series[0].size(); ++j) {
      worst = std::max(worst, (series[run][j] - series[0][j]).norm());
    }
  }
  v.detail << " max ||R~_k - R~_0||_F = " << worst;
  v.require(worst <= 1e-10, "R~ series differ");
}

void noise_free_convergence(Verdict& v) {
  ExperimentConfig cfg = ExperimentConfig::default_config();
  cfg.scenario.duration = 30.0;
  cfg.metrics.fit_end = 30.0;
  cfg.metrics.steady_state_start = 30.0;
  cfg.output.stride = 10;
  const ExperimentResult r = evaluate(cfg);
  for (const auto& s : r.summaries) {
    v.detail << " " << s.name << "(" << s.final_max.attitude << ", " << s.final_max.position << ", "
             << s.final_max.velocity << "; slopes " << s.slope.attitude << "/" << s.slope.position
             << "/" << s.slope.velocity << ")";
    v.require(s.final_max.attitude < 1e-5, s.name + " attitude");
    v.require(s.final_max.position < 1e-4, s.name + " position");
    v.require(s.final_max.velocity < 1e-4, s.name + " velocity");
    v.require(s.slope.attitude < 0.0 && s.slope.position < 0.0 && s.slope.velocity < 0.0,
              s.name + " slope");
  }
}

void iekf_structure(Verdict& v) {
  const Scenario sc = Scenario::default_scenario();
  const SimLog log = run_scenario(sc);
  // Epoch-wise assembly along a filter run from a perturbed start.
  Pose est = log.truth[0].X;
  est.R = exp_so3(Vec3(0.1, 0.05, -0.1)) * est.R;
  est.p += Vec3(0.5, -0.5, 0.2);
  MekfState m{est, Cov9::scaled_identity(1.0)};
  const Mat6 noise = imu_noise_matrix(1e-4 * Mat3::Identity(), 1e-2 * Mat3::Identity());
  const Mat9 a_ref = iekf_state_matrix(sc.gravity);
  const OutputMatrix9 c_ref = iekf_output_matrix(sc.landmarks);
  const Mat9 ma_ref = mekf_state_matrix(m.est.R, log.imu[0].a_m);
  bool iekf_identical = true;
  bool mekf_differs = false;
  std::size_t k = 0;
  for (std::size_t j = 0; j + 1 < log.imu.size(); ++j) {
    iekf_identical &= iekf_state_matrix(sc.gravity) == a_ref;
    iekf_identical &= iekf_output_matrix(sc.landmarks) == c_ref;
    mekf_differs |= mekf_state_matrix(m.est.R, log.imu[j].a_m) != ma_ref;
    if (log.is_landmark_epoch(j)) {
      m = mekf_update(m, log.landmarks[k++], sc.landmarks, 2.5e-3 * Mat3::Identity());
    }
    m = mekf_predict(m, log.imu[j], sc.gravity, noise, sc.dt());
  }
  v.detail << " epochs " << log.imu.size() << ", IEKF A/C identical: " << iekf_identical
           << ", MEKF A differs: " << mekf_differs;
  v.require(iekf_identical, "IEKF A_t or C_t changed");
  v.require(mekf_differs, "MEKF A_t constant");
}

void error_identities(Verdict& v) {
  Random rng(105);
  const LandmarkSet landmarks = Scenario::default_landmarks();
  const auto stats = constellation_stats(landmarks);
  const Vec3 p_c = stats.p_c;
  double worst_sigma = 0.0, worst_y = 0.0, worst_jump = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose x = rng.pose();
    GeoObserverState s;
    s.est = rng.pose();
    s.gains = Gains(rng.uniform(0.01, 0.1), rng.mat3(), rng.mat3());
    const Mat3 r_err = x.R.matrix() * s.est.R.matrix().transpose();
    const Vec3 p_err = x.p - r_err * s.est.p - (Mat3::Identity() - r_err) * p_c;
    const Vec3 v_err = x.v - r_err * s.est.v;
    const auto obs = observe(x, landmarks);
    const Innovation inn = innovations(s.est, obs, landmarks);
    worst_sigma = std::max(worst_sigma, (inn.sigma_R - psi_oracle(stats.M * r_err)).norm());
    worst_y = std::max(worst_y, (inn.y - r_err.transpose() * p_err).norm());

    const Mat3& r = x.R.matrix();
    const Vec3 p_next = p_err - r * s.gains.K_p() * r.transpose() * p_err;
    const Vec3 v_next = v_err - r * s.gains.K_v() * r.transpose() * p_err;
    for (const auto& after : {hybrid_discrete_attitude_jump(s, obs, landmarks),
                              hybrid_continuous_attitude_jump(s, obs, landmarks)}) {
      const Mat3 re = x.R.matrix() * after.est.R.matrix().transpose();
      const Vec3 pe = x.p - re * after.est.p - (Mat3::Identity() - re) * p_c;
      const Vec3 ve = x.v - re * after.est.v;
      worst_jump = std::max({worst_jump, (pe - p_next).norm(), (ve - v_next).norm()});
    }
  }
  v.detail << " sigma_R " << worst_sigma << ", y " << worst_y << ", jump map " << worst_jump;
  v.require(worst_sigma <= 1e-12, "sigma_R = psi(M R~)");
  v.require(worst_y <= 1e-12, "y = R~^T p~");
  v.require(worst_jump <= 1e-11, "jump map");
}

void riccati_properties(Verdict& v) {
  const Scenario sc = Scenario::default_scenario();
  const SimLog log = run_scenario(sc);
  const auto stats = constellation_stats(sc.landmarks);
  VariableGainTuning tuning;
  tuning.v_bar.topLeftCorner<3, 3>() = 1e-4 * Mat3::Identity();
  tuning.v_bar.bottomRightCorner<3, 3>() = 1e-2 * Mat3::Identity();
  tuning.epsilon = default_epsilon(tuning.v_bar);

  // CRE: continuous observer with variable gains.
  GeoObserverState c;
  c.est = log.truth[0].X;
  c.est.p += Vec3(1, -1, 1) / std::sqrt(3.0);
  c.gains = Gains::isotropic(0.2, 0.0, 0.0);
  tuning.q_bar = 2.5e-3 / sc.imu_rate * Mat3::Identity();
  c.riccati = RiccatiGain{Cov6::scaled_identity(1.0), tuning};
  bool cre_ok = true;
  CovarianceBounds<double> cre_bounds;
  for (std::size_t j = 0; j + 1 < log.imu.size(); ++j) {
    c = continuous_observer_step(c, log.imu[j], log.dense_landmarks[j], sc.landmarks, sc.gravity, sc.dt());
    cre_ok &= symmetric_pd(c.riccati->P.matrix());
    cre_bounds.observe(c.riccati->P);
  }

  // CD-Riccati: hybrid discrete-attitude observer with variable gains.
  GeoObserverState h;
  h.est = log.truth[0].X;
  h.est.p += Vec3(1, -1, 1) / std::sqrt(3.0);
  h.gains = Gains::isotropic(default_discrete_attitude_gain(stats), 0.0, 0.0);
  tuning.q_bar = 2.5e-3 * Mat3::Identity();
  h.riccati = RiccatiGain{Cov6::scaled_identity(1.0), tuning};
  bool cd_ok = true;
  CovarianceBounds<double> cd_bounds;
  std::size_t k = 0;
  for (std::size_t j = 0; j + 1 < log.imu.size(); ++j) {
    if (log.is_landmark_epoch(j)) {
      h = hybrid_discrete_attitude_jump(h, log.landmarks[k++], sc.landmarks);
      cd_ok &= symmetric_pd(h.riccati->P.matrix());
    }
    h = hybrid_discrete_attitude_flow(h, log.imu[j], sc.landmarks, sc.gravity, sc.dt());
    cd_ok &= symmetric_pd(h.riccati->P.matrix());
    cd_bounds.observe(h.riccati->P);
  }

  // Scalar fixture p' = -p^2 + 1.
  using Mat1 = Eigen::Matrix<double, 1, 1>;
  Covariance<double, 1> p(Mat1::Constant(1.0));
  for (int i = 0; i < 2000; ++i) {
    p = cre_step<double, 1, 1>(p, Mat1::Zero(), Mat1::Ones(), Mat1::Ones(), Mat1::Ones(), 0.01);
  }
  Covariance<double, 1> q(Mat1::Constant(5.0));
  for (int i = 0; i < 2000; ++i) {
    q = cre_step<double, 1, 1>(q, Mat1::Zero(), Mat1::Ones(), Mat1::Ones(), Mat1::Ones(), 0.01);
  }
  const double scalar_err = std::max(std::abs(p.matrix()(0, 0) - 1.0), std::abs(q.matrix()(0, 0) - 1.0));

  // Joseph form.
  Random rng(106);
  double worst_joseph = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Mat6 a;
    for (int e = 0; e < 36; ++e) {
      a(e) = rng.normal();
    }
    const Cov6 pc(a * a.transpose() + 0.1 * Mat6::Identity());
    Eigen::Matrix<double, 3, 6> cm;
    for (int e = 0; e < 18; ++e) {
      cm(e) = rng.normal();
    }
    const Mat3 b = rng.mat3();
    const Mat3 qm = b * b.transpose() + 0.1 * Mat3::Identity();
    const auto upd = cd_riccati_update<double, 6, 3>(pc, cm, qm);
    const Mat6 ikc = Mat6::Identity() - upd.K * cm;
    const Mat6 joseph = ikc * pc.matrix() * ikc.transpose() + upd.K * qm * upd.K.transpose();
    worst_joseph = std::max(worst_joseph, (upd.P.matrix() - joseph).norm() / std::max(1.0, joseph.norm()));
  }
  v.detail << " CRE bounds [" << cre_bounds.p_m << ", " << cre_bounds.p_M << "], CD bounds ["
           << cd_bounds.p_m << ", " << cd_bounds.p_M << "], scalar " << scalar_err << ", Joseph "
           << worst_joseph;
  v.require(cre_ok, "CRE P symmetric PD");
  v.require(cd_ok, "CD-Riccati P symmetric PD");
  v.require(scalar_err <= 1e-6, "scalar steady state");
  v.require(worst_joseph <= 1e-9, "Joseph form");
}

void fixed_gain_certification(Verdict& v) {
  const auto good = fixed_gain_design(0.5, 0.3, 0.05, 0.2);
  const auto none = fixed_gain_design(0.0, 0.0, 0.05, 0.2);
  v.detail << " (0.5,0.3): " << (good.certified ? "certified" : "failed") << " worst eig "
           << good.worst_eigenvalue << "; (0,0): " << (none.certified ? "certified" : "failed");
  v.require(good.certified, "(0.5, 0.3) not certified");
  v.require(!none.certified, "(0, 0) certified");

  ExperimentConfig cfg = ExperimentConfig::default_config();
  cfg.scenario.schedule = LandmarkSchedule::jittered(0.05, 0.2);
  std::vector<ObserverConfig> hybrids;
  for (auto o : cfg.observers) {
    if (o.kind == ObserverKind::kHybridDiscrete || o.kind == ObserverKind::kHybridContinuous) {
      o.k_p = 0.5;
      o.k_v = 0.3;
      hybrids.push_back(o);
    }
  }
  cfg.observers = hybrids;
  cfg.output.stride = 10;
  const ExperimentResult r = evaluate(cfg);
  for (const auto& s : r.summaries) {
    v.detail << " ; " << s.name << " final (" << s.final_max.attitude << ", " << s.final_max.position
             << ", " << s.final_max.velocity << ")";
    v.require(s.final_max.attitude < 1e-5 && s.final_max.position < 1e-4 && s.final_max.velocity < 1e-4,
              s.name + " did not converge");
    v.require(s.slope.position < 0.0 && s.slope.velocity < 0.0, s.name + " slope");
  }
}

void discrete_attitude_contraction(Verdict& v) {
  Random rng(108);
  const LandmarkSet landmarks = Scenario::default_landmarks();
  const double k_r = default_discrete_attitude_gain(constellation_stats(landmarks));
  const double angle0 = 2.0 * std::asin(0.5);  // |R~|_I = 0.5
  const int jumps = 10;
  std::size_t increases = 0;
  double total_decrease = 0.0;
  double worst_increase = 0.0;
  for (int draw = 0; draw < 1000; ++draw) {
    const Pose x = rng.pose();
    GeoObserverState s;
    s.est = x;
    s.est.R = exp_so3(Vec3(rng.unit() * angle0)).inverse() * x.R;
    s.gains = Gains::isotropic(k_r, 0.5, 0.3);
    const auto obs = observe(x, landmarks);
    double prev = (x.R * s.est.R.inverse()).angle();
    for (int j = 0; j < jumps; ++j) {
      s = hybrid_discrete_attitude_jump(s, obs, landmarks);
      const double now = (x.R * s.est.R.inverse()).angle();
      if (now > prev + 1e-12) {
        ++increases;
        worst_increase = std::max(worst_increase, now - prev);
      }
      total_decrease += prev - now;
      prev = now;
    }
  }
  const double mean_decrease = total_decrease / (1000.0 * jumps);
  v.detail << " k_R = " << k_r << ", increases " << increases << "/" << 1000 * jumps
           << " (worst " << worst_increase << " rad), mean decrease per jump " << mean_decrease << " rad";
  v.require(increases == 0, "angle increased across a jump");
  v.require(mean_decrease > 0.0, "no average decrease");
}

void noisy_smoke(Verdict& v) {
  ExperimentConfig cfg = ExperimentConfig::default_config();
  cfg.scenario.noise = NoiseSpec::isotropic(0.01, 0.1, 0.05);
  cfg.monte_carlo.runs = 25;
  cfg.output.stride = 1;
  for (auto k : {ObserverKind::kContinuous, ObserverKind::kHybridDiscrete, ObserverKind::kHybridContinuous}) {
    ObserverConfig o;
    o.kind = k;
    o.gains = GainMode::kVariable;
    o.name = to_string(k) + "-variable";
    cfg.observers.push_back(o);
  }
  const ExperimentResult r = evaluate(cfg);
  std::map<std::string, ErrorTriple> fixed;
  for (const auto& s : r.summaries) {
    v.detail << " " << s.name << "(" << s.rmse.attitude << " deg, " << s.rmse.position << " m)";
    v.require(s.rmse.position < 0.5, s.name + " position RMSE");
    v.require(s.rmse.attitude < 2.0, s.name + " attitude RMSE");
    if (s.gains == GainMode::kFixed) {
      fixed[to_string(s.kind)] = s.rmse;
    }
  }
  for (const auto& s : r.summaries) {
    if (s.gains == GainMode::kVariable) {
      const ErrorTriple& f = fixed.at(to_string(s.kind));
      v.require(s.rmse.position <= 1.5 * f.position, s.name + " position RMSE vs fixed");
      v.require(s.rmse.attitude <= 1.5 * f.attitude, s.name + " attitude RMSE vs fixed");
    }
  }
}

void determinism(Verdict& v, const std::string& cli) {
  if (cli.empty()) {
    v.require(false, "CLI path not given");
    return;
  }
  const auto root = std::filesystem::temp_directory_path() / "navobs_acceptance_determinism";
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root);
  const auto config = root / "config.json";
  {
    std::ofstream out(config);
    out << R"({
  "scenario": {"duration": 20, "seed": 42,
               "landmark_schedule": {"kind": "jittered", "T_m": 0.05, "T_M": 0.2}},
  "noise": {"gyro_sigma": 0.01, "accel_sigma": 0.1, "landmark_sigma": 0.05},
  "observers": [
    {"kind": "mekf"}, {"kind": "iekf"}, {"kind": "continuous"},
    {"kind": "hybrid-discrete"}, {"kind": "hybrid-continuous", "gains": "variable"}
  ],
  "monte_carlo": {"runs": 3}
})";
  }
  for (const char* run : {"a", "b"}) {
    const std::string cmd = "\"" + cli + "\" run --quiet --config \"" + config.string() + "\" --out \"" +
                            (root / run).string() + "\"";
    const int rc = std::system(cmd.c_str());
    v.require(rc == 0, std::string("CLI exit status for run ") + run);
  }
  std::size_t compared = 0;
  bool identical = true;
  for (const auto& entry : std::filesystem::directory_iterator(root / "a")) {
    const auto other = root / "b" / entry.path().filename();
    identical &= std::filesystem::exists(other) && slurp(entry.path()) == slurp(other);
    ++compared;
  }
  v.detail << " compared " << compared << " files";
  v.require(compared == 6, "expected 5 CSVs and summary.json");
  v.require(identical, "outputs differ");
  std::filesystem::remove_all(root);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  criterion(1, "Lie kernel oracle suite", 10.0, lie_kernel);
  criterion(2, "attitude-error decoupling", 30.0, decoupling);
  criterion(3, "noise-free convergence of all observers", 120.0, noise_free_convergence);
  criterion(4, "IEKF linearization is state-independent", 5.0, iekf_structure);
  criterion(5, "error-form identities and jump maps", 0.0, error_identities);
  criterion(6, "Riccati properties", 0.0, riccati_properties);
  criterion(7, "fixed-gain certification", 10.0, fixed_gain_certification);
  criterion(8, "discrete-attitude contraction", 0.0, discrete_attitude_contraction);
  criterion(9, "noisy Monte-Carlo smoke test", 300.0, noisy_smoke);
  criterion(10, "two-process determinism", 0.0, [&](Verdict& v) { determinism(v, cli); });
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
