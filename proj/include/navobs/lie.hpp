#ifndef NAVOBS_LIE_HPP
#define NAVOBS_LIE_HPP

// SO(3) / SE_2(3) kernel. Everything here is header-only and templated on
// the scalar type; the rest of the library instantiates it with double.
//
// SE_2(3) embedding used throughout:
//
//          [ R  v  p ]
//   T  =   [ 0  1  0 ]        se_2(3) element:  [ w^  alpha  nu ]
//          [ 0  0  1 ]                          [ 0    0     0  ]
//
// so column 4 carries velocity and column 5 carries position.

#include <cmath>
#include <numbers>

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "navobs/errors.hpp"

namespace navobs {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Matrix5 = Eigen::Matrix<Scalar, 5, 5>;
template <typename Scalar>
using Vector9 = Eigen::Matrix<Scalar, 9, 1>;

using Vec3 = Vector3<double>;
using Mat3 = Matrix3<double>;
using Mat5 = Matrix5<double>;
using Vec9 = Vector9<double>;

/// Cross-product matrix: hat3(u) * w == u x w.
template <typename Derived>
Matrix3<typename Derived::Scalar> hat3(const Eigen::MatrixBase<Derived>& u) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using S = typename Derived::Scalar;
  Matrix3<S> m;
  m << S(0), -u(2), u(1),
       u(2), S(0), -u(0),
      -u(1), u(0), S(0);
  return m;
}

/// Inverse of hat3. Throws NotSkew when ||A + A^T||_F > 1e-9; otherwise the
/// vector of the skew part (A - A^T) / 2 is returned.
template <typename Derived>
Vector3<typename Derived::Scalar> vee3(const Eigen::MatrixBase<Derived>& a) {
  using S = typename Derived::Scalar;
  if ((a + a.transpose()).norm() > S(1e-9)) {
    throw NotSkew("vee3: matrix is not skew-symmetric");
  }
  return Vector3<S>(a(2, 1) - a(1, 2), a(0, 2) - a(2, 0), a(1, 0) - a(0, 1)) / S(2);
}

/// Anti-symmetric projection (A - A^T) / 2.
template <typename Derived>
Matrix3<typename Derived::Scalar> proj_antisym(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.transpose()) / typename Derived::Scalar(2);
}

/// psi(A) = vee3(proj_antisym(A)), defined for any 3x3 matrix.
template <typename Derived>
Vector3<typename Derived::Scalar> psi(const Eigen::MatrixBase<Derived>& a) {
  using S = typename Derived::Scalar;
  return Vector3<S>(a(2, 1) - a(1, 2), a(0, 2) - a(2, 0), a(1, 0) - a(0, 1)) / S(2);
}

namespace detail {

// Rodrigues coefficients sin(t)/t, (1-cos t)/t^2, (t - sin t)/t^3 with a
// Taylor branch below 1e-4.
template <typename S>
struct SO3Coefficients {
  S a;
  S b;
  S c;
};

template <typename S>
SO3Coefficients<S> so3_coefficients(S theta) {
  const S t2 = theta * theta;
  if (theta < S(1e-4)) {
    return {S(1) - t2 / S(6) + t2 * t2 / S(120),
            S(0.5) - t2 / S(24) + t2 * t2 / S(720),
            S(1) / S(6) - t2 / S(120) + t2 * t2 / S(5040)};
  }
  const S s = std::sin(theta);
  const S co = std::cos(theta);
  return {s / theta, (S(1) - co) / t2, (theta - s) / (t2 * theta)};
}

}  // namespace detail

/// Attitude on SO(3). Construction from an arbitrary matrix is checked
/// (||m^T m - I||_F <= 1e-9, |det m - 1| <= 1e-9); the closed-form producers
/// below build valid matrices directly.
template <typename Scalar = double>
class Rotation {
 public:
  using Matrix = Matrix3<Scalar>;
  using Vector = Vector3<Scalar>;

  static constexpr Scalar kTolerance = Scalar(1e-9);

  Rotation() : m_(Matrix::Identity()) {}

  /// Throws InvalidRotation if m is not a rotation to 1e-9.
  explicit Rotation(const Matrix& m) : m_(m) {
    if (!is_rotation(m)) {
      throw InvalidRotation("Rotation: matrix is not orthonormal with det +1");
    }
  }

  static Rotation identity() { return Rotation(); }

  /// Skips the invariant check. Only for matrices that are rotations by
  /// construction (closed-form maps, products of rotations).
  static Rotation unchecked(const Matrix& m) {
    Rotation r;
    r.m_ = m;
    return r;
  }

  /// Closest rotation in the Frobenius norm (polar decomposition via SVD).
  static Rotation nearest(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix u = svd.matrixU();
    const Matrix v = svd.matrixV();
    if ((u * v.transpose()).determinant() < Scalar(0)) {
      u.col(2) = -u.col(2);
    }
    return unchecked(u * v.transpose());
  }

  static bool is_rotation(const Matrix& m, Scalar tol = kTolerance) {
    return m.allFinite() && (m.transpose() * m - Matrix::Identity()).norm() <= tol &&
           std::abs(m.determinant() - Scalar(1)) <= tol;
  }

  const Matrix& matrix() const { return m_; }
  Rotation inverse() const { return unchecked(m_.transpose()); }
  Rotation operator*(const Rotation& other) const { return unchecked(m_ * other.m_); }
  Vector operator*(const Vector& x) const { return m_ * x; }

  /// Rotation angle in [0, pi].
  Scalar angle() const {
    const Scalar c = (m_.trace() - Scalar(1)) / Scalar(2);
    const Scalar s = psi(m_).norm();
    return std::atan2(s, c);
  }

 private:
  Matrix m_;
};

using Rot = Rotation<double>;

/// SO(3) exponential (Rodrigues).
template <typename Derived>
Rotation<typename Derived::Scalar> exp_so3(const Eigen::MatrixBase<Derived>& theta) {
  using S = typename Derived::Scalar;
  const Matrix3<S> w = hat3(theta);
  const auto k = detail::so3_coefficients(theta.norm());
  return Rotation<S>::unchecked(Matrix3<S>::Identity() + k.a * w + k.b * w * w);
}

/// SO(3) logarithm, returning the rotation vector with angle in [0, pi].
/// Within 1e-6 of pi the axis is taken from the dominant column of the
/// symmetric part of (R + I) / 2.
template <typename Scalar>
Vector3<Scalar> log_so3(const Rotation<Scalar>& rot) {
  const Matrix3<Scalar>& r = rot.matrix();
  const Vector3<Scalar> s = psi(r);  // sin(theta) * axis
  const Scalar c = (r.trace() - Scalar(1)) / Scalar(2);
  const Scalar sn = s.norm();
  const Scalar theta = std::atan2(sn, c);
  if (theta < Scalar(1e-4)) {
    const Scalar t2 = theta * theta;
    return s * (Scalar(1) + t2 / Scalar(6) + Scalar(7) * t2 * t2 / Scalar(360));
  }
  if (std::numbers::pi_v<Scalar> - theta < Scalar(1e-6)) {
    const Matrix3<Scalar> b =
        ((r + r.transpose()) / Scalar(2) + Matrix3<Scalar>::Identity()) / Scalar(2);
    Eigen::Index j = 0;
    b.diagonal().maxCoeff(&j);
    Vector3<Scalar> axis = b.col(j) / std::sqrt(b(j, j));
    axis.normalize();
    if (axis.dot(s) < Scalar(0)) {
      axis = -axis;
    }
    return theta * axis;
  }
  return s * (theta / sn);
}

/// Left Jacobian of SO(3): J = I + (1-cos t)/t^2 W + (t - sin t)/t^3 W^2.
template <typename Derived>
Matrix3<typename Derived::Scalar> left_jacobian_so3(const Eigen::MatrixBase<Derived>& theta) {
  using S = typename Derived::Scalar;
  const Matrix3<S> w = hat3(theta);
  const auto k = detail::so3_coefficients(theta.norm());
  return Matrix3<S>::Identity() + k.b * w + k.c * w * w;
}

/// Cayley parameterization: rotation by 2 atan(|sigma|) about sigma.
template <typename Derived>
Rotation<typename Derived::Scalar> cayley(const Eigen::MatrixBase<Derived>& sigma) {
  using S = typename Derived::Scalar;
  const S n2 = sigma.squaredNorm();
  const Matrix3<S> m = ((S(1) - n2) * Matrix3<S>::Identity() +
                        S(2) * sigma * sigma.transpose() + S(2) * hat3(sigma)) /
                       (S(1) + n2);
  return Rotation<S>::unchecked(m);
}

/// Element of se_2(3): rotation part theta, velocity column alpha, position
/// column nu.
template <typename Scalar = double>
struct TangentVector9 {
  Vector3<Scalar> theta = Vector3<Scalar>::Zero();
  Vector3<Scalar> alpha = Vector3<Scalar>::Zero();
  Vector3<Scalar> nu = Vector3<Scalar>::Zero();

  static TangentVector9 from_vector(const Vector9<Scalar>& x) {
    return {x.template segment<3>(0), x.template segment<3>(3), x.template segment<3>(6)};
  }
  Vector9<Scalar> to_vector() const {
    Vector9<Scalar> x;
    x << theta, alpha, nu;
    return x;
  }
  /// 5x5 matrix form.
  Matrix5<Scalar> hat() const {
    Matrix5<Scalar> m = Matrix5<Scalar>::Zero();
    m.template block<3, 3>(0, 0) = hat3(theta);
    m.template block<3, 1>(0, 3) = alpha;
    m.template block<3, 1>(0, 4) = nu;
    return m;
  }
};

using Tangent9 = TangentVector9<double>;

/// Navigation state (R, v, p) viewed as an element of SE_2(3).
template <typename Scalar = double>
struct ExtendedPose {
  Rotation<Scalar> R;
  Vector3<Scalar> v = Vector3<Scalar>::Zero();
  Vector3<Scalar> p = Vector3<Scalar>::Zero();

  static ExtendedPose identity() { return {}; }

  /// The 5x5 embedding T(R, v, p).
  Matrix5<Scalar> embed() const {
    Matrix5<Scalar> x = Matrix5<Scalar>::Identity();
    x.template block<3, 3>(0, 0) = R.matrix();
    x.template block<3, 1>(0, 3) = v;
    x.template block<3, 1>(0, 4) = p;
    return x;
  }

  /// Inverse of a 5x5 matrix with SE_2(3) structure. Throws InvalidArgument
  /// if the bottom rows are not [0 I2] or the rotation block is invalid.
  static ExtendedPose from_matrix(const Matrix5<Scalar>& x) {
    Eigen::Matrix<Scalar, 2, 5> bottom = Eigen::Matrix<Scalar, 2, 5>::Zero();
    bottom(0, 3) = Scalar(1);
    bottom(1, 4) = Scalar(1);
    if ((x.template bottomRows<2>() - bottom).norm() > Scalar(1e-12)) {
      throw InvalidArgument("ExtendedPose: bottom rows are not [0 I2]");
    }
    return {Rotation<Scalar>(x.template block<3, 3>(0, 0)), x.template block<3, 1>(0, 3),
            x.template block<3, 1>(0, 4)};
  }

  /// (R^T, -R^T v, -R^T p).
  ExtendedPose inverse() const {
    const Rotation<Scalar> rt = R.inverse();
    return {rt, -(rt * v), -(rt * p)};
  }

  ExtendedPose operator*(const ExtendedPose& o) const {
    return {R * o.R, R * o.v + v, R * o.p + p};
  }
};

using Pose = ExtendedPose<double>;

/// SE_2(3) exponential: (exp_so3(theta), J_l alpha, J_l nu).
template <typename Scalar>
ExtendedPose<Scalar> exp_se23(const TangentVector9<Scalar>& xi) {
  const Matrix3<Scalar> j = left_jacobian_so3(xi.theta);
  return {exp_so3(xi.theta), j * xi.alpha, j * xi.nu};
}

/// Observer gains (k_R, K_p, K_v) with k_R > 0.
template <typename Scalar = double>
class GainSet {
 public:
  GainSet(Scalar k_R, const Matrix3<Scalar>& K_p, const Matrix3<Scalar>& K_v)
      : k_R_(k_R), K_p_(K_p), K_v_(K_v) {
    if (!(k_R > Scalar(0))) {
      throw InvalidArgument("GainSet: k_R must be positive");
    }
  }

  static GainSet isotropic(Scalar k_R, Scalar k_p, Scalar k_v) {
    return GainSet(k_R, k_p * Matrix3<Scalar>::Identity(), k_v * Matrix3<Scalar>::Identity());
  }

  Scalar k_R() const { return k_R_; }
  const Matrix3<Scalar>& K_p() const { return K_p_; }
  const Matrix3<Scalar>& K_v() const { return K_v_; }

  void set_translational(const Matrix3<Scalar>& K_p, const Matrix3<Scalar>& K_v) {
    K_p_ = K_p;
    K_v_ = K_v;
  }

 private:
  Scalar k_R_;
  Matrix3<Scalar> K_p_;
  Matrix3<Scalar> K_v_;
};

using Gains = GainSet<double>;

/// Gain map onto se_2(3): [k_R Pa(A1), K_v a3, K_p a3; 0]. Column 4 of the
/// innovation argument is structurally zero, so both translational gains act
/// on the position column a3.
template <typename Scalar>
Matrix5<Scalar> proj_gain(const Matrix5<Scalar>& m, const GainSet<Scalar>& k) {
  Matrix5<Scalar> out = Matrix5<Scalar>::Zero();
  const Vector3<Scalar> a3 = m.template block<3, 1>(0, 4);
  out.template block<3, 3>(0, 0) = k.k_R() * proj_antisym(m.template block<3, 3>(0, 0));
  out.template block<3, 1>(0, 3) = k.K_v() * a3;
  out.template block<3, 1>(0, 4) = k.K_p() * a3;
  return out;
}

/// Ad_X U = X U X^{-1}.
template <typename Scalar>
Matrix5<Scalar> adjoint(const ExtendedPose<Scalar>& x, const Matrix5<Scalar>& u) {
  return x.embed() * u * x.inverse().embed();
}

}  // namespace navobs

#endif  // NAVOBS_LIE_HPP
