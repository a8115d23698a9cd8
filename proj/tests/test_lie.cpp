#include <gtest/gtest.h>

#include "navobs/lie.hpp"
#include "test_support.hpp"

using namespace navobs;
using navobs::oracle::kPi;
using navobs::oracle::Random;
using navobs::oracle::series_exp;

TEST(Hat3, UnitX) {
  Mat3 expected;
  expected << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  EXPECT_EQ(hat3(Vec3(1, 0, 0)), expected);
  EXPECT_EQ(hat3(Vec3::Zero()), Mat3::Zero());
}

TEST(Hat3, MatchesCrossProduct) {
  Random rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 u = rng.vec3(3.0);
    const Vec3 w = rng.vec3(3.0);
    EXPECT_LT((hat3(u) * w - oracle::cross_components(u, w)).norm(), 1e-14);
  }
}

TEST(Vee3, RoundTripAndRejectsNonSkew) {
  EXPECT_EQ(vee3(hat3(Vec3(1, 2, 3))), Vec3(1, 2, 3));
  EXPECT_EQ(vee3(Mat3::Zero().eval()), Vec3::Zero());
  Random rng(2);
  for (int i = 0; i < 100; ++i) {
    const Mat3 m = rng.mat3();
    const Mat3 a = m - m.transpose();
    EXPECT_LT((hat3(vee3(a)) - a).norm(), 1e-14);
  }
  EXPECT_THROW(vee3(Mat3::Identity().eval()), NotSkew);
}

TEST(Psi, Properties) {
  Random rng(3);
  const Mat3 m = rng.mat3();
  EXPECT_LT(psi(Mat3(m + m.transpose())).norm(), 1e-14);
  const Vec3 u = rng.vec3();
  EXPECT_LT((psi(hat3(u)) - u).norm(), 1e-14);
  for (int i = 0; i < 100; ++i) {
    const Mat3 a = rng.mat3();
    EXPECT_LT((psi(a) - vee3(Mat3((a - a.transpose()) / 2.0))).norm(), 1e-14);
  }
}

TEST(ProjAntisym, Properties) {
  Random rng(4);
  const Mat3 m = rng.mat3();
  EXPECT_LT(proj_antisym(Mat3(m + m.transpose())).norm(), 1e-15);
  const Mat3 s = m - m.transpose();
  EXPECT_LT((proj_antisym(s) - s).norm(), 1e-15);
  const Mat3 pa = proj_antisym(m);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_DOUBLE_EQ(pa(i, j), (m(i, j) - m(j, i)) / 2.0);
    }
  }
}

TEST(ExpSo3, KnownValues) {
  EXPECT_EQ(exp_so3(Vec3::Zero()).matrix(), Mat3::Identity());
  Mat3 quarter;
  quarter << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_LT((exp_so3(Vec3(0, 0, kPi / 2)).matrix() - quarter).norm(), 1e-15);
}

TEST(ExpSo3, MatchesSeries) {
  Random rng(5);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 theta = rng.rotation_vector(kPi);
    EXPECT_LT((exp_so3(theta).matrix() - series_exp<3>(hat3(theta))).norm(), 1e-12);
  }
  // Taylor branch
  for (int i = 0; i < 200; ++i) {
    const Vec3 theta = rng.rotation_vector(2e-4);
    EXPECT_LT((exp_so3(theta).matrix() - series_exp<3>(hat3(theta))).norm(), 1e-15);
  }
}

TEST(LogSo3, RoundTrips) {
  EXPECT_EQ(log_so3(Rot::identity()), Vec3::Zero());
  const Vec3 t(0.3, -0.2, 0.1);
  EXPECT_LT((log_so3(exp_so3(t)) - t).norm(), 1e-10);
  Random rng(6);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 theta = rng.rotation_vector(kPi - 1e-3);
    EXPECT_LT((log_so3(exp_so3(theta)) - theta).norm(), 1e-9);
  }
}

TEST(LogSo3, NearPi) {
  Random rng(7);
  for (int i = 0; i < 200; ++i) {
    const Vec3 axis = rng.unit();
    const Vec3 theta = axis * (kPi - 1e-4);
    const Rot r = Rot::unchecked(series_exp<3>(hat3(theta)));
    const Vec3 got = log_so3(r);
    // axis sign is ambiguous only at exactly pi
    EXPECT_LT((got - theta).norm(), 1e-6);
  }
}

TEST(Rotation, ConstructorValidates) {
  EXPECT_NO_THROW(Rot(Mat3::Identity()));
  EXPECT_THROW(Rot(Mat3(2.0 * Mat3::Identity())), InvalidRotation);
  EXPECT_THROW(Rot(Mat3(-Mat3::Identity())), InvalidRotation);
  Random rng(8);
  const Rot r = Rot::nearest(rng.rotation().matrix() + 1e-3 * rng.mat3());
  EXPECT_TRUE(Rot::is_rotation(r.matrix(), 1e-12));
}

TEST(ExtendedPose, EmbedAndInverse) {
  EXPECT_EQ(Pose::identity().embed(), Mat5::Identity());
  Random rng(9);
  for (int i = 0; i < 500; ++i) {
    const Pose x = rng.pose();
    EXPECT_LT((x.embed() * x.inverse().embed() - Mat5::Identity()).norm(), 1e-12);
    const Pose back = x.inverse().inverse();
    EXPECT_LT((back.embed() - x.embed()).norm(), 1e-12);
    EXPECT_LT(((x * x.inverse()).embed() - Mat5::Identity()).norm(), 1e-12);
  }
}

TEST(ExtendedPose, FromMatrixChecksStructure) {
  Mat5 m = Mat5::Identity();
  EXPECT_NO_THROW(Pose::from_matrix(m));
  m(3, 4) = 1.0;
  EXPECT_THROW(Pose::from_matrix(m), InvalidArgument);
}

TEST(ExpSe23, KnownValues) {
  EXPECT_EQ(exp_se23(Tangent9{}).embed(), Mat5::Identity());
  Tangent9 xi;
  xi.alpha = Vec3(1, 2, 3);
  xi.nu = Vec3(-4, 5, 0.5);
  const Pose x = exp_se23(xi);
  EXPECT_EQ(x.R.matrix(), Mat3::Identity());
  EXPECT_EQ(x.v, xi.alpha);
  EXPECT_EQ(x.p, xi.nu);
}

TEST(ExpSe23, MatchesSeries) {
  Random rng(10);
  for (int i = 0; i < 2000; ++i) {
    Tangent9 xi;
    xi.theta = rng.rotation_vector(kPi);
    xi.alpha = rng.vec3(2.0);
    xi.nu = rng.vec3(2.0);
    const Pose x = exp_se23(xi);
    EXPECT_LT((x.embed() - series_exp<5>(xi.hat())).norm(), 1e-10);
    EXPECT_TRUE(Rot::is_rotation(x.R.matrix(), 1e-12));
  }
}

TEST(Tangent9, VectorRoundTrip) {
  Random rng(11);
  Vec9 x;
  for (int i = 0; i < 9; ++i) {
    x(i) = rng.normal();
  }
  EXPECT_EQ(Tangent9::from_vector(x).to_vector(), x);
}

TEST(Cayley, KnownValues) {
  EXPECT_EQ(cayley(Vec3::Zero()).matrix(), Mat3::Identity());
  Mat3 expected;
  expected << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  EXPECT_LT((cayley(Vec3(1, 0, 0)).matrix() - expected).norm(), 1e-15);
}

TEST(Cayley, MatchesExponential) {
  Random rng(12);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 sigma = rng.vec3(2.0);
    const double n = sigma.norm();
    const Rot oracle = exp_so3(Vec3(2.0 * std::atan(n) * sigma / n));
    EXPECT_LT((cayley(sigma).matrix() - oracle.matrix()).norm(), 1e-12);
  }
}

TEST(Cayley, LargeArgumentsStayOrthonormal) {
  Random rng(13);
  for (double scale : {1.0, 10.0, 100.0, 1000.0}) {
    for (int i = 0; i < 100; ++i) {
      const Mat3 r = cayley(Vec3(rng.unit() * scale)).matrix();
      EXPECT_LT(oracle::orthonormality_error(r), 1e-12);
      EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    }
  }
}

TEST(LeftJacobian, MatchesIntegralSeries) {
  // J_l(theta) = sum_k (theta^)^k / (k + 1)!
  Random rng(14);
  for (int i = 0; i < 200; ++i) {
    const Vec3 theta = rng.rotation_vector(kPi);
    const Mat3 w = hat3(theta);
    Mat3 term = Mat3::Identity();
    Mat3 sum = Mat3::Identity();
    double fact = 1.0;
    for (int k = 1; k < 30; ++k) {
      term = term * w;
      fact *= static_cast<double>(k + 1);
      sum += term / fact;
    }
    EXPECT_LT((left_jacobian_so3(theta) - sum).norm(), 1e-12);
  }
}

TEST(ProjGain, BlockLayout) {
  EXPECT_EQ(proj_gain(Mat5::Zero().eval(), Gains::isotropic(1, 1, 1)), Mat5::Zero());
  Random rng(15);
  Mat5 m = Mat5::Zero();
  const Mat3 a = rng.mat3();
  m.block<3, 3>(0, 0) = a + a.transpose();
  EXPECT_LT(proj_gain(m, Gains::isotropic(1, 1, 1)).norm(), 1e-15);

  Mat5 r;
  for (int i = 0; i < 25; ++i) {
    r(i) = rng.normal();
  }
  const Gains k(2.0, Mat3::Identity(), 3.0 * Mat3::Identity());
  const Mat5 out = proj_gain(r, k);
  const Mat3 a1 = r.block<3, 3>(0, 0);
  const Vec3 a3 = r.block<3, 1>(0, 4);
  EXPECT_LT((out.block<3, 3>(0, 0) - 2.0 * (a1 - a1.transpose()) / 2.0).norm(), 1e-14);
  EXPECT_LT((out.block<3, 1>(0, 3) - 3.0 * a3).norm(), 1e-14);
  EXPECT_LT((out.block<3, 1>(0, 4) - a3).norm(), 1e-14);
  EXPECT_EQ(out.bottomRows<2>(), (Eigen::Matrix<double, 2, 5>::Zero()));

  // structure is idempotent under unit gains
  const Mat5 again = proj_gain(proj_gain(r, Gains::isotropic(1, 1, 1)), Gains::isotropic(1, 1, 1));
  EXPECT_LT((again - proj_gain(r, Gains::isotropic(1, 1, 1))).norm(), 1e-14);
}

TEST(Adjoint, Properties) {
  Random rng(16);
  Tangent9 xi;
  xi.theta = rng.vec3();
  xi.alpha = rng.vec3();
  xi.nu = rng.vec3();
  const Mat5 u = xi.hat();
  EXPECT_LT((adjoint(Pose::identity(), u) - u).norm(), 1e-15);
  const Pose x = rng.pose();
  EXPECT_EQ(adjoint(x, Mat5::Zero().eval()), Mat5::Zero());
  const Mat5 triple = x.embed() * u * x.embed().inverse();
  EXPECT_LT((adjoint(x, u) - triple).norm(), 1e-12 * std::max(1.0, triple.norm()));

  Tangent9 eta;
  eta.theta = rng.vec3();
  eta.alpha = rng.vec3();
  eta.nu = rng.vec3();
  const Mat5 u2 = eta.hat();
  const Mat5 lin = adjoint(x, Mat5(1.5 * u - 0.7 * u2));
  const Mat5 sum = 1.5 * adjoint(x, u) - 0.7 * adjoint(x, u2);
  EXPECT_LT((lin - sum).norm(), 1e-12 * std::max(1.0, sum.norm()));
}

TEST(GainSet, RejectsNonPositiveAttitudeGain) {
  EXPECT_THROW(Gains::isotropic(0.0, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(Gains::isotropic(-1.0, 1.0, 1.0), InvalidArgument);
}
