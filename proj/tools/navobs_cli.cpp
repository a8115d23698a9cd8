// navobs: simulate scenarios and benchmark inertial-navigation observers.
//
//   navobs simulate      --config cfg.json --out dir
//   navobs run           --config cfg.json [--seed N] [--out dir] [--quiet]
//   navobs verify-gains  --config cfg.json
//   navobs compare       --config cfg.json
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "navobs/bench/config.hpp"
#include "navobs/bench/experiment.hpp"
#include "navobs/errors.hpp"
#include "navobs/scenario.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "experiment config (JSON); defaults to the built-in config");
  cmd->add_option("--seed", o.seed, "base seed, overrides scenario.seed");
  cmd->add_option("--out", o.out, "output directory, overrides output.dir");
  cmd->add_flag("--quiet", o.quiet, "suppress the summary table");
}

navobs::bench::ExperimentConfig load(const CommonOptions& o) {
  navobs::bench::ExperimentConfig cfg = o.config.empty()
                                            ? navobs::bench::ExperimentConfig::default_config()
                                            : navobs::bench::load_config(o.config);
  if (o.seed) {
    cfg.scenario.seed = *o.seed;
  }
  if (!o.out.empty()) {
    cfg.output.dir = o.out;
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inertial navigation observer benchmark"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto* simulate = app.add_subcommand("simulate", "write the simulated log (truth, IMU, landmarks) as CSV");
  auto* run = app.add_subcommand("run", "run the experiment and write per-observer CSVs and summary.json");
  auto* verify = app.add_subcommand("verify-gains", "certify fixed gains and report observability conditions");
  auto* compare = app.add_subcommand("compare", "run the experiment and print the comparison table");
  for (auto* cmd : {simulate, run, verify, compare}) {
    add_common(cmd, opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    const auto cfg = load(opts);
    if (simulate->parsed()) {
      const navobs::SimLog log = navobs::run_scenario(cfg.scenario);
      navobs::write_simlog_csv(log, cfg.output.dir);
      if (!opts.quiet) {
        std::cout << "wrote " << log.truth.size() << " IMU epochs and " << log.landmarks.size()
                  << " landmark epochs to " << cfg.output.dir.string() << "\n";
      }
    } else if (verify->parsed()) {
      std::cout << navobs::bench::verify_gains_report(cfg);
    } else {
      const auto result = navobs::bench::run_experiment(cfg);
      if (!opts.quiet || compare->parsed()) {
        std::cout << navobs::bench::compare_table(result);
      }
    }
  } catch (const navobs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const navobs::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const navobs::InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
