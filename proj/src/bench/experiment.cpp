#include "navobs/bench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "navobs/bench/estimators.hpp"
#include "navobs/csv.hpp"
#include "navobs/errors.hpp"
#include "navobs/geometric.hpp"

namespace navobs::bench {

namespace {

constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

bool is_geometric(ObserverKind k) {
  return k == ObserverKind::kContinuous || k == ObserverKind::kHybridDiscrete ||
         k == ObserverKind::kHybridContinuous;
}

bool is_hybrid(ObserverKind k) {
  return k == ObserverKind::kHybridDiscrete || k == ObserverKind::kHybridContinuous;
}

Scenario scenario_for_run(const ExperimentConfig& cfg, int r) {
  Scenario sc = cfg.scenario;
  sc.seed = run_seed(cfg, r);
  return sc;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

}  // namespace

std::uint64_t run_seed(const ExperimentConfig& cfg, int r) {
  return cfg.scenario.seed + static_cast<std::uint64_t>(r) * cfg.monte_carlo.seed_stride;
}

ObserverRun run_observer(const ObserverConfig& cfg, const Scenario& sc, const SimLog& log,
                         int stride) {
  if (log.truth.empty()) {
    throw InvalidArgument("run_observer: empty log");
  }
  const std::size_t n = log.truth.size();
  const double dt = sc.dt();
  const Vec3 p_c = sc.landmarks.center();
  auto est = make_estimator(cfg, sc, perturb(log.truth.front().X, cfg.init));

  ObserverRun out;
  auto observe_covariance = [&] {
    if (const auto ev = est->covariance_eigenvalues()) {
      out.p_m = std::min(out.p_m.value_or(ev->minCoeff()), ev->minCoeff());
      out.p_M = std::max(out.p_M.value_or(ev->maxCoeff()), ev->maxCoeff());
    }
  };

  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (k < log.landmark_index.size() && log.landmark_index[k] == j) {
      est->measure(log.landmarks[k]);
      ++k;
      observe_covariance();
    }
    if (j % static_cast<std::size_t>(stride) == 0 || j + 1 == n) {
      ErrorRecord e = compute_errors(log.truth[j], est->estimate(), p_c);
      if (const auto tr = est->covariance_trace()) {
        e.trace_P = *tr;
      }
      out.records.push_back(e);
    }
    if (j + 1 < n) {
      est->propagate(log.imu[j], log.dense_landmarks[j], dt);
      observe_covariance();
    }
  }
  return out;
}

ObserverSummary summarize(const ExperimentConfig& cfg, std::size_t observer,
                          const std::vector<const ObserverRun*>& runs) {
  const ObserverConfig& oc = cfg.observers.at(observer);
  ObserverSummary s;
  s.name = oc.name;
  s.kind = oc.kind;
  s.gains = oc.gains;
  if (is_geometric(oc.kind)) {
    s.resolved_gains = resolve_gains(oc, cfg.scenario);
  }

  double sa = 0.0, sp = 0.0, sv = 0.0;
  std::size_t count = 0;
  for (const ObserverRun* run : runs) {
    const ErrorRecord& last = run->records.back();
    s.final_max.attitude = std::max(s.final_max.attitude, last.att_angle);
    s.final_max.position = std::max(s.final_max.position, last.pos_norm());
    s.final_max.velocity = std::max(s.final_max.velocity, last.vel_norm());

    std::vector<double> t, ea, ep, ev;
    for (const ErrorRecord& e : run->records) {
      if (e.t >= cfg.metrics.steady_state_start) {
        const double a = e.att_angle * kRadToDeg;
        sa += a * a;
        sp += e.pos_norm() * e.pos_norm();
        sv += e.vel_norm() * e.vel_norm();
        ++count;
      }
      if (e.t <= cfg.metrics.fit_end) {
        t.push_back(e.t);
        ea.push_back(e.att_angle);
        ep.push_back(e.pos_norm());
        ev.push_back(e.vel_norm());
      }
    }
    s.slope.attitude += log_slope(t, ea) / static_cast<double>(runs.size());
    s.slope.position += log_slope(t, ep) / static_cast<double>(runs.size());
    s.slope.velocity += log_slope(t, ev) / static_cast<double>(runs.size());

    if (run->p_m) {
      s.p_m = std::min(s.p_m.value_or(*run->p_m), *run->p_m);
      s.p_M = std::max(s.p_M.value_or(*run->p_M), *run->p_M);
    }
  }
  if (count > 0) {
    const auto c = static_cast<double>(count);
    s.rmse = {std::sqrt(sa / c), std::sqrt(sp / c), std::sqrt(sv / c)};
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.rmse = {nan, nan, nan};
  }

  const Thresholds& th = cfg.metrics.thresholds;
  auto check = [&](const std::optional<double>& bound, double value, const char* what) {
    if (bound && !(value <= *bound)) {
      s.failed_thresholds.emplace_back(what);
    }
  };
  check(th.final_attitude_rad, s.final_max.attitude, "final_attitude_rad");
  check(th.final_position, s.final_max.position, "final_position");
  check(th.final_velocity, s.final_max.velocity, "final_velocity");
  check(th.rmse_attitude_deg, s.rmse.attitude, "rmse_attitude_deg");
  check(th.rmse_position, s.rmse.position, "rmse_position");
  check(th.rmse_velocity, s.rmse.velocity, "rmse_velocity");
  return s;
}

ExperimentResult evaluate(const ExperimentConfig& cfg) {
  cfg.validate();
  const int runs = cfg.monte_carlo.runs;
  ExperimentResult result;
  result.runs.resize(static_cast<std::size_t>(runs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(runs));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < runs; r = next++) {
      try {
        const Scenario sc = scenario_for_run(cfg, r);
        const SimLog log = run_scenario(sc);
        auto& out = result.runs[static_cast<std::size_t>(r)];
        for (const auto& oc : cfg.observers) {
          out.push_back(run_observer(oc, sc, log, cfg.output.stride));
        }
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  int threads = cfg.monte_carlo.threads;
  if (threads == 0) {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  threads = std::min(threads, runs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }

  for (std::size_t o = 0; o < cfg.observers.size(); ++o) {
    std::vector<const ObserverRun*> per_run;
    for (const auto& run : result.runs) {
      per_run.push_back(&run[o]);
    }
    result.summaries.push_back(summarize(cfg, o, per_run));
  }
  return result;
}

const std::vector<std::string>& error_csv_header() {
  static const std::vector<std::string> header = {
      "run",         "t",           "att_err",     "att_angle",   "pos_err_x",   "pos_err_y",
      "pos_err_z",   "pos_err_norm", "vel_err_x",  "vel_err_y",   "vel_err_z",   "vel_err_norm",
      "naive_pos_x", "naive_pos_y", "naive_pos_z", "naive_vel_x", "naive_vel_y", "naive_vel_z",
      "trace_P"};
  return header;
}

namespace {

nlohmann::json triple_json(const ErrorTriple& e) {
  return {{"attitude", e.attitude}, {"position", e.position}, {"velocity", e.velocity}};
}

nlohmann::json optional_json(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

}  // namespace

void write_reports(const ExperimentConfig& cfg, const ExperimentResult& result,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t o = 0; o < cfg.observers.size(); ++o) {
    csv::Writer w(dir / (cfg.observers[o].name + ".csv"), error_csv_header());
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
      for (const ErrorRecord& e : result.runs[r][o].records) {
        w << static_cast<long long>(r) << e.t << e.att_err << e.att_angle;
        w << e.pos_err.x() << e.pos_err.y() << e.pos_err.z() << e.pos_norm();
        w << e.vel_err.x() << e.vel_err.y() << e.vel_err.z() << e.vel_norm();
        w << e.naive_pos.x() << e.naive_pos.y() << e.naive_pos.z();
        w << e.naive_vel.x() << e.naive_vel.y() << e.naive_vel.z();
        w << e.trace_P;
        w.end_row();
      }
    }
  }

  nlohmann::json summary;
  summary["runs"] = cfg.monte_carlo.runs;
  summary["seed"] = cfg.scenario.seed;
  summary["seed_stride"] = cfg.monte_carlo.seed_stride;
  summary["duration"] = cfg.scenario.duration;
  summary["steady_state_start"] = cfg.metrics.steady_state_start;
  summary["fit_end"] = cfg.metrics.fit_end;
  summary["units"] = {{"final", "attitude rad, position m, velocity m/s"},
                      {"rmse", "attitude deg, position m, velocity m/s"},
                      {"slope", "1/s, least squares on log error"}};
  nlohmann::json list = nlohmann::json::array();
  bool all_pass = true;
  for (const ObserverSummary& s : result.summaries) {
    nlohmann::json j;
    j["name"] = s.name;
    j["kind"] = to_string(s.kind);
    j["gains"] = to_string(s.gains);
    if (s.resolved_gains) {
      j["k_R"] = s.resolved_gains->k_R();
      j["k_p"] = s.resolved_gains->K_p()(0, 0);
      j["k_v"] = s.resolved_gains->K_v()(0, 0);
    }
    j["csv"] = s.name + ".csv";
    j["final"] = triple_json(s.final_max);
    j["rmse"] = triple_json(s.rmse);
    j["slope"] = triple_json(s.slope);
    j["p_m"] = optional_json(s.p_m);
    j["p_M"] = optional_json(s.p_M);
    j["failed_thresholds"] = s.failed_thresholds;
    j["pass"] = s.pass();
    all_pass = all_pass && s.pass();
    list.push_back(j);
  }
  summary["observers"] = list;
  summary["pass"] = all_pass;
  std::ofstream out(dir / "summary.json", std::ios::binary);
  if (!out) {
    throw InvalidArgument("cannot write summary.json in '" + dir.string() + "'");
  }
  out << summary.dump(2) << '\n';
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result = evaluate(cfg);
  write_reports(cfg, result, cfg.output.dir);
  return result;
}

std::string verify_gains_report(const ExperimentConfig& cfg) {
  std::ostringstream os;
  const ObservabilityReport obs = check_observability_conditions(cfg.scenario.landmarks);
  const auto [t_m, t_big] = cfg.scenario.gap_bounds();

  if (!obs.non_collinear) {
    os << "WARNING: landmarks are collinear (or fewer than three); attitude is not observable\n";
  }
  if (!obs.distinct_eigenvalues) {
    os << "WARNING: M has repeated eigenvalues\n";
  }
  if (!obs.m_bar_positive_definite) {
    os << "WARNING: M_bar is not positive definite\n";
  }
  os << "landmarks: " << cfg.scenario.landmarks.size() << "\n";
  const Vec3& pc = obs.stats.p_c;
  os << "p_c: [" << fmt("%.6g", pc.x()) << ", " << fmt("%.6g", pc.y()) << ", "
     << fmt("%.6g", pc.z()) << "]\n";
  os << "eig(M): " << fmt("%.6g", obs.stats.eigenvalues(0)) << " "
     << fmt("%.6g", obs.stats.eigenvalues(1)) << " " << fmt("%.6g", obs.stats.eigenvalues(2))
     << "\n";
  os << "k_R bound (discrete attitude): k_R < " << fmt("%.6g", 1.0 / obs.kr_bound) << "\n";
  os << "sqrt(varsigma_M) basin estimate: " << fmt("%.6g", obs.sqrt_varsigma) << "\n";
  os << "sampling interval: [" << fmt("%.6g", t_m) << ", " << fmt("%.6g", t_big) << "] s\n";

  bool any = false;
  for (const auto& o : cfg.observers) {
    if (!is_hybrid(o.kind)) {
      continue;
    }
    any = true;
    const Gains g = resolve_gains(o, cfg.scenario);
    os << "\n[" << o.name << "] k_R = " << fmt("%.6g", g.k_R());
    if (o.kind == ObserverKind::kHybridDiscrete) {
      os << (g.k_R() * obs.kr_bound < 1.0 ? " (within bound)" : " (VIOLATES bound)");
    }
    os << "\n";
    if (o.gains == GainMode::kVariable) {
      os << "  translational gains: Riccati (no fixed-gain certificate needed)\n";
      continue;
    }
    const double k_p = g.K_p()(0, 0);
    const double k_v = g.K_v()(0, 0);
    const FixedGainDesign d = fixed_gain_design(k_p, k_v, t_m, t_big);
    os << "  k_p = " << fmt("%.6g", k_p) << ", k_v = " << fmt("%.6g", k_v) << "\n";
    os << "  spectral radius of A_d at tau* = " << fmt("%.6g", d.tau_star) << ": "
       << fmt("%.6g", d.spectral_radius) << "\n";
    if (d.certified) {
      os << "  verdict: certified-on-grid (worst eigenvalue " << fmt("%.6g", d.worst_eigenvalue)
         << " at tau = " << fmt("%.6g", d.worst_tau) << ")\n";
    } else {
      os << "  verdict: failed (" << d.reason << ")\n";
    }
  }
  if (!any) {
    os << "\nno hybrid observers configured\n";
  }
  return os.str();
}

std::string compare_table(const ExperimentResult& result) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %11s %11s %11s %11s %11s %11s %10s %5s\n", "observer",
                "final_att", "final_pos", "final_vel", "rmse_deg", "rmse_pos", "rmse_vel",
                "slope_pos", "pass");
  os << line;
  for (const auto& s : result.summaries) {
    std::snprintf(line, sizeof(line), "%-24s %11.3e %11.3e %11.3e %11.4g %11.4g %11.4g %10.3g %5s\n",
                  s.name.c_str(), s.final_max.attitude, s.final_max.position,
                  s.final_max.velocity, s.rmse.attitude, s.rmse.position, s.rmse.velocity,
                  s.slope.position, s.pass() ? "yes" : "no");
    os << line;
  }
  return os.str();
}

}  // namespace navobs::bench
