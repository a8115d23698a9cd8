#ifndef NAVOBS_BENCH_ESTIMATORS_HPP
#define NAVOBS_BENCH_ESTIMATORS_HPP

#include <memory>
#include <optional>

#include <Eigen/Core>

#include "navobs/bench/config.hpp"
#include "navobs/geometric.hpp"
#include "navobs/kalman.hpp"

namespace navobs::bench {

/// Uniform driver interface over the five observers. At a landmark epoch
/// measure() runs before propagate(); the continuous observer ignores
/// measure() and consumes the dense stream in propagate().
class Estimator {
 public:
  virtual ~Estimator() = default;

  virtual void measure(const LandmarkObservation& obs) = 0;
  virtual void propagate(const ImuSample& imu, const LandmarkObservation& dense, double dt) = 0;
  virtual const Pose& estimate() const = 0;

  /// Ascending eigenvalues of the filter or Riccati covariance, if any.
  virtual std::optional<Eigen::VectorXd> covariance_eigenvalues() const { return std::nullopt; }
  virtual std::optional<double> covariance_trace() const { return std::nullopt; }
};

/// Initial estimate built from the truth and an InitialError.
Pose perturb(const Pose& truth, const InitialError& e);

/// Gains actually used for a geometric observer (defaults filled in).
Gains resolve_gains(const ObserverConfig& cfg, const Scenario& sc);

std::unique_ptr<Estimator> make_estimator(const ObserverConfig& cfg, const Scenario& sc,
                                          const Pose& initial);

}  // namespace navobs::bench

#endif  // NAVOBS_BENCH_ESTIMATORS_HPP
