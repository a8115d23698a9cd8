#ifndef NAVOBS_BENCH_EXPERIMENT_HPP
#define NAVOBS_BENCH_EXPERIMENT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "navobs/bench/config.hpp"
#include "navobs/bench/metrics.hpp"

namespace navobs::bench {

/// Error time series of one observer on one Monte-Carlo run.
struct ObserverRun {
  std::vector<ErrorRecord> records;
  // Extreme covariance eigenvalues over the run, when the observer has one.
  std::optional<double> p_m;
  std::optional<double> p_M;
};

struct ErrorTriple {
  double attitude = 0.0;  // rad for final errors, deg for RMSE
  double position = 0.0;
  double velocity = 0.0;
};

struct ObserverSummary {
  std::string name;
  ObserverKind kind = ObserverKind::kMekf;
  GainMode gains = GainMode::kFixed;
  std::optional<Gains> resolved_gains;  // geometric observers only
  ErrorTriple final_max;  // worst final error over runs
  ErrorTriple rmse;       // over t >= steady_state_start, all runs
  ErrorTriple slope;      // mean log-error slope (1/s) over t <= fit_end
  std::optional<double> p_m;
  std::optional<double> p_M;
  std::vector<std::string> failed_thresholds;
  bool pass() const { return failed_thresholds.empty(); }
};

struct ExperimentResult {
  std::vector<ObserverSummary> summaries;
  std::vector<std::vector<ObserverRun>> runs;  // [run][observer]
};

/// Runs one observer on a simulated log, recording every stride-th epoch
/// and the final one.
ObserverRun run_observer(const ObserverConfig& cfg, const Scenario& sc, const SimLog& log,
                         int stride);

/// Seed of Monte-Carlo run r.
std::uint64_t run_seed(const ExperimentConfig& cfg, int r);

/// All runs and summaries in memory; no files written.
ExperimentResult evaluate(const ExperimentConfig& cfg);

/// Summary statistics from per-run records (the same numbers a reader gets
/// by recomputing from the CSV files).
ObserverSummary summarize(const ExperimentConfig& cfg, std::size_t observer,
                          const std::vector<const ObserverRun*>& runs);

/// CSV column names, in order.
const std::vector<std::string>& error_csv_header();

/// Writes <dir>/<name>.csv per observer and <dir>/summary.json.
void write_reports(const ExperimentConfig& cfg, const ExperimentResult& result,
                   const std::filesystem::path& dir);

/// evaluate + write_reports into cfg.output.dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Text report: fixed-gain grid certificates for the hybrid observers,
/// constellation eigenstructure, k_R bound and basin estimate.
std::string verify_gains_report(const ExperimentConfig& cfg);

/// Fixed-width table of the summaries.
std::string compare_table(const ExperimentResult& result);

}  // namespace navobs::bench

#endif  // NAVOBS_BENCH_EXPERIMENT_HPP
