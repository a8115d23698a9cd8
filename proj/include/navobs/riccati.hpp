#ifndef NAVOBS_RICCATI_HPP
#define NAVOBS_RICCATI_HPP

// Covariance machinery shared by the variable-gain observers and the Kalman
// filters: RK4 integration of the (differential) Riccati equation, the
// discrete measurement update, a finite-window observability Gramian and a
// running eigenvalue-bounds monitor.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "navobs/errors.hpp"

namespace navobs {

template <typename Scalar, int N>
using SquareMatrix = Eigen::Matrix<Scalar, N, N>;

/// Symmetric positive-definite covariance. Construction symmetrizes the
/// input (the asymmetry must already be below 1e-9) and throws NonPositive
/// if the Cholesky factorization fails.
template <typename Scalar, int N>
class Covariance {
 public:
  using Matrix = SquareMatrix<Scalar, N>;

  explicit Covariance(const Matrix& p) {
    if (!p.allFinite()) {
      throw NonPositive("covariance has non-finite entries");
    }
    if ((p - p.transpose()).norm() > Scalar(1e-9) * std::max(Scalar(1), p.norm())) {
      throw InvalidArgument("covariance is not symmetric");
    }
    p_ = (p + p.transpose()) / Scalar(2);
    if (Eigen::LLT<Matrix>(p_).info() != Eigen::Success) {
      throw NonPositive("covariance is not positive definite");
    }
  }

  static Covariance scaled_identity(Scalar s) { return Covariance(s * Matrix::Identity()); }

  const Matrix& matrix() const { return p_; }
  Scalar trace() const { return p_.trace(); }

  /// Ascending eigenvalues.
  Eigen::Matrix<Scalar, N, 1> eigenvalues() const {
    return Eigen::SelfAdjointEigenSolver<Matrix>(p_, Eigen::EigenvaluesOnly).eigenvalues();
  }

 private:
  Matrix p_;
};

namespace detail {

template <typename Matrix, typename Rhs>
Matrix rk4(const Matrix& x, typename Matrix::Scalar dt, Rhs&& f) {
  using S = typename Matrix::Scalar;
  const Matrix k1 = f(x);
  const Matrix k2 = f(Matrix(x + (dt / S(2)) * k1));
  const Matrix k3 = f(Matrix(x + (dt / S(2)) * k2));
  const Matrix k4 = f(Matrix(x + dt * k3));
  return x + (dt / S(6)) * (k1 + S(2) * k2 + S(2) * k3 + k4);
}

}  // namespace detail

/// One RK4 step of P_dot = A P + P A^T + V, then symmetrization.
template <typename Scalar, int N>
Covariance<Scalar, N> cre_step(const Covariance<Scalar, N>& p, const SquareMatrix<Scalar, N>& a,
                               const SquareMatrix<Scalar, N>& v, Scalar dt) {
  if (!(dt > Scalar(0))) {
    throw InvalidArgument("cre_step: dt must be positive");
  }
  using Matrix = SquareMatrix<Scalar, N>;
  const Matrix next = detail::rk4(p.matrix(), dt, [&](const Matrix& x) -> Matrix {
    return a * x + x * a.transpose() + v;
  });
  return Covariance<Scalar, N>((next + next.transpose()) / Scalar(2));
}

/// RK4 integration of P_dot = A P + P A^T - P C^T Q C P + V over dt, then
/// symmetrization. Q enters as the weight of the quadratic term. A large Q
/// makes the equation stiff, so dt is split into substeps with
/// h (2||A|| + 2||P C^T Q C||) <= 1, re-evaluated as P evolves; when that
/// bound already holds this is a single RK4 step. More than 10^5 substeps
/// throws NonPositive.
template <typename Scalar, int N, int M>
Covariance<Scalar, N> cre_step(const Covariance<Scalar, N>& p, const SquareMatrix<Scalar, N>& a,
                               const SquareMatrix<Scalar, N>& v,
                               const Eigen::Matrix<Scalar, M, N>& c,
                               const SquareMatrix<Scalar, M>& q, Scalar dt) {
  if (!(dt > Scalar(0))) {
    throw InvalidArgument("cre_step: dt must be positive");
  }
  using Matrix = SquareMatrix<Scalar, N>;
  const Matrix ctqc = c.transpose() * q * c;
  const Scalar a_norm = a.norm();
  auto rhs = [&](const Matrix& x) -> Matrix {
    return a * x + x * a.transpose() - x * ctqc * x + v;
  };
  Matrix x = p.matrix();
  Scalar remaining = dt;
  for (int substeps = 0; remaining > Scalar(0); ++substeps) {
    if (substeps == 100000) {
      throw NonPositive("cre_step: too many substeps, the equation is too stiff");
    }
    const Scalar rate = Scalar(2) * a_norm + Scalar(2) * (x * ctqc).norm();
    Scalar h = rate > Scalar(0) ? std::min(remaining, Scalar(1) / rate) : remaining;
    if (remaining - h < Scalar(1e-12) * dt) {
      h = remaining;
    }
    x = detail::rk4(x, h, rhs);
    x = (x + x.transpose()) / Scalar(2);
    if (!x.allFinite()) {
      throw NonPositive("cre_step: covariance diverged");
    }
    remaining -= h;
  }
  return Covariance<Scalar, N>(x);
}

template <typename Scalar, int N, int M>
struct RiccatiUpdate {
  Eigen::Matrix<Scalar, N, M> K;
  Covariance<Scalar, N> P;
};

/// K = P C^T (C P C^T + Q)^{-1}, P+ = P - K C P (symmetrized). The
/// innovation covariance is factored with Cholesky; failure raises
/// SingularInnovation.
template <typename Scalar, int N, int M>
RiccatiUpdate<Scalar, N, M> cd_riccati_update(const Covariance<Scalar, N>& p,
                                              const Eigen::Matrix<Scalar, M, N>& c,
                                              const SquareMatrix<Scalar, M>& q) {
  using GainMatrix = Eigen::Matrix<Scalar, N, M>;
  const SquareMatrix<Scalar, N>& pm = p.matrix();
  const Eigen::Matrix<Scalar, N, M> pct = pm * c.transpose();
  SquareMatrix<Scalar, M> s = c * pct + q;
  s = (s + s.transpose()) / Scalar(2);
  const Eigen::LLT<SquareMatrix<Scalar, M>> llt(s);
  if (!s.allFinite() || llt.info() != Eigen::Success) {
    throw SingularInnovation("innovation covariance is not positive definite");
  }
  // K^T = S^{-1} (P C^T)^T
  const GainMatrix k = llt.solve(pct.transpose()).transpose();
  const SquareMatrix<Scalar, N> next = pm - k * c * pm;
  return {k, Covariance<Scalar, N>((next + next.transpose()) / Scalar(2))};
}

template <typename Scalar, int N>
struct GramianResult {
  SquareMatrix<Scalar, N> W;
  Scalar lambda_min;
};

/// Finite-window observability Gramian
///   W = int_{t0}^{t0+window} Phi(s,t0)^T C(s)^T C(s) Phi(s,t0) ds
/// integrated jointly with Phi_dot = A Phi by RK4 on a grid no coarser than
/// dt. A(t) returns an N x N matrix, C(t) an M x N matrix.
template <typename Scalar, int N, typename AFn, typename CFn>
GramianResult<Scalar, N> observability_gramian(AFn&& a_of_t, CFn&& c_of_t, Scalar t0,
                                               Scalar window, Scalar dt) {
  if (!(window > Scalar(0)) || !(dt > Scalar(0))) {
    throw InvalidArgument("observability_gramian: window and dt must be positive");
  }
  using Matrix = SquareMatrix<Scalar, N>;
  using Joint = Eigen::Matrix<Scalar, N, 2 * N>;  // [Phi | W]
  const auto steps = static_cast<long>(std::ceil(window / dt - Scalar(1e-9)));
  const Scalar h = window / static_cast<Scalar>(steps);

  auto rhs = [&](Scalar t, const Joint& x) -> Joint {
    const Matrix phi = x.template leftCols<N>();
    const auto c = c_of_t(t);
    Joint d;
    d.template leftCols<N>() = a_of_t(t) * phi;
    d.template rightCols<N>() = phi.transpose() * c.transpose() * c * phi;
    return d;
  };

  Joint x;
  x.template leftCols<N>() = Matrix::Identity();
  x.template rightCols<N>() = Matrix::Zero();
  for (long i = 0; i < steps; ++i) {
    const Scalar t = t0 + static_cast<Scalar>(i) * h;
    const Joint k1 = rhs(t, x);
    const Joint k2 = rhs(t + h / Scalar(2), Joint(x + (h / Scalar(2)) * k1));
    const Joint k3 = rhs(t + h / Scalar(2), Joint(x + (h / Scalar(2)) * k2));
    const Joint k4 = rhs(t + h, Joint(x + h * k3));
    x += (h / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
  }
  Matrix w = x.template rightCols<N>();
  w = (w + w.transpose()) / Scalar(2);
  const Scalar lmin =
      Eigen::SelfAdjointEigenSolver<Matrix>(w, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return {w, std::max(lmin, Scalar(0))};
}

/// Running extreme eigenvalues p_m <= lambda(P) <= p_M over a run.
template <typename Scalar>
struct CovarianceBounds {
  Scalar p_m = std::numeric_limits<Scalar>::infinity();
  Scalar p_M = Scalar(0);
  bool empty() const { return p_M == Scalar(0) && std::isinf(p_m); }

  template <int N>
  void observe(const Covariance<Scalar, N>& p) {
    const auto ev = p.eigenvalues();
    p_m = std::min(p_m, ev(0));
    p_M = std::max(p_M, ev(N - 1));
  }
};

}  // namespace navobs

#endif  // NAVOBS_RICCATI_HPP
