#ifndef NAVOBS_RNG_HPP
#define NAVOBS_RNG_HPP

#include <cstdint>

#include <Eigen/Core>

namespace navobs {

/// Counter-based 64-bit generator: output n is the SplitMix64 finalizer of
/// key + (n + 1) * 0x9E3779B97F4A7C15, where key mixes (seed, stream). The
/// sequence is a pure function of (seed, stream, n), so it is identical on
/// every platform and independent streams never share state.
///
/// Normals use Box-Muller on two consecutive uniforms; both outputs of a
/// pair are consumed in order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal.
  double normal();
  /// Three independent standard normals.
  Eigen::Vector3d normal3();

  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Draws N(0, cov) as L * n with L the Cholesky factor of cov. Singular
/// covariances (including zero) fall back to the symmetric eigen square root.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Eigen::Matrix3d& cov);

  Eigen::Vector3d sample(CounterRng& rng) const { return factor_ * rng.normal3(); }
  const Eigen::Matrix3d& factor() const { return factor_; }

 private:
  Eigen::Matrix3d factor_;
};

}  // namespace navobs

#endif  // NAVOBS_RNG_HPP
