#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "ampkin/errors.h"
#include "ampkin/rotations.h"
#include "oracles.h"
#include "random_inputs.h"

using namespace ampkin;

namespace {

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(AxisAngle, ZeroIsIdentity) {
  EXPECT_EQ(axis_angle_to_matrix({Vec3::Zero()}).matrix(), Mat3::Identity());
}

TEST(AxisAngle, HalfTurnAboutX) {
  const Mat3 r = axis_angle_to_matrix({Vec3(std::numbers::pi, 0, 0)}).matrix();
  Mat3 expected = Mat3::Zero();
  expected.diagonal() << 1.0, -1.0, -1.0;
  EXPECT_LE(max_abs(r - expected), 1e-15);
}

TEST(AxisAngle, MatchesQuaternionOracle) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = testing_support::random_axis_angle(rng, 2.0 * std::numbers::pi);
    EXPECT_LE(max_abs(axis_angle_to_matrix({v}).matrix() - oracle::axis_angle_matrix(v)), 1e-12);
  }
}

TEST(AxisAngle, TinyAnglesStayOrthonormal) {
  for (double a : {1e-300, 1e-20, 1e-9, 1e-5}) {
    const Mat3 r = axis_angle_to_matrix({Vec3(a, -a, 0.5 * a)}).matrix();
    EXPECT_TRUE(is_rotation(r, 1e-12));
    EXPECT_LE(max_abs(r - oracle::axis_angle_matrix(Vec3(a, -a, 0.5 * a))), 1e-12);
  }
}

TEST(AxisAngle, OutputIsProperRotation) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const Mat3 r = axis_angle_to_matrix({Vec3(rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20))}).matrix();
    EXPECT_LE(max_abs(r.transpose() * r - Mat3::Identity()), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  }
}

TEST(AxisAngle, NonFiniteRejected) {
  EXPECT_THROW((void)axis_angle_to_matrix({Vec3(std::numeric_limits<double>::quiet_NaN(), 0, 0)}), InvalidInputError);
  EXPECT_THROW((void)axis_angle_to_matrix({Vec3(std::numeric_limits<double>::infinity(), 0, 0)}), InvalidInputError);
}

TEST(AxisAngle, RoundTripCanonical) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = testing_support::random_axis_angle(rng, 3.0);
    const AxisAngle back = matrix_to_axis_angle(axis_angle_to_matrix({v}));
    EXPECT_LE((back.v - v).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE(back.v.norm(), std::numbers::pi + 1e-12);
  }
}

TEST(AxisAngle, CanonicalizeFoldsAngle) {
  const AxisAngle c = canonicalize({Vec3(0, 0, 1.5 * std::numbers::pi)});
  EXPECT_NEAR(c.v[2], -0.5 * std::numbers::pi, 1e-12);
  EXPECT_LE(max_abs(axis_angle_to_matrix(c).matrix() -
                    axis_angle_to_matrix({Vec3(0, 0, 1.5 * std::numbers::pi)}).matrix()),
            1e-12);
}

TEST(AxisAngle, ZeroMatrixHasNoAxisAngle) {
  EXPECT_THROW((void)matrix_to_axis_angle(RotationMatrix::zero()), DegenerateRepresentationError);
}

TEST(RotationMatrixType, ValidatesInput) {
  Mat3 scaled = 2.0 * Mat3::Identity();
  EXPECT_THROW((void)RotationMatrix::from_matrix(scaled), InvalidInputError);
  Mat3 reflection = Mat3::Identity();
  reflection(0, 0) = -1.0;
  EXPECT_THROW((void)RotationMatrix::from_matrix(reflection), InvalidInputError);
  EXPECT_TRUE(RotationMatrix::from_matrix(Mat3::Zero()).is_zero());
  EXPECT_FALSE(RotationMatrix::identity().is_zero());
}

TEST(Rot6D, IdentityColumns) {
  const Rot6D x = matrix_to_6d(RotationMatrix::identity());
  EXPECT_EQ(x.a, Vec3(1, 0, 0));
  EXPECT_EQ(x.b, Vec3(0, 1, 0));
}

TEST(Rot6D, HalfTurnColumns) {
  const Rot6D x = matrix_to_6d(axis_angle_to_matrix({Vec3(std::numbers::pi, 0, 0)}));
  EXPECT_LE((x.a - Vec3(1, 0, 0)).norm(), 1e-15);
  EXPECT_LE((x.b - Vec3(0, -1, 0)).norm(), 1e-15);
}

TEST(Rot6D, DecodeIdentityAndScale) {
  EXPECT_EQ(rot6d_to_matrix({Vec3(1, 0, 0), Vec3(0, 1, 0)}).matrix(), Mat3::Identity());
  EXPECT_LE(max_abs(rot6d_to_matrix({Vec3(2, 0, 0), Vec3(0, 3, 0)}).matrix() - Mat3::Identity()), 1e-15);
}

TEST(Rot6D, DegenerateInputsRejected) {
  EXPECT_THROW((void)rot6d_to_matrix({Vec3(1, 0, 0), Vec3(1, 0, 0)}), DegenerateRepresentationError);
  EXPECT_THROW((void)rot6d_to_matrix({Vec3(1, 0, 0), Vec3(-3, 0, 0)}), DegenerateRepresentationError);
  EXPECT_THROW((void)rot6d_to_matrix({Vec3::Zero(), Vec3(0, 1, 0)}), DegenerateRepresentationError);
  EXPECT_THROW((void)rot6d_to_matrix({Vec3(1, 0, 0), Vec3::Zero()}), DegenerateRepresentationError);
  EXPECT_THROW((void)matrix_to_6d(RotationMatrix::zero()), DegenerateRepresentationError);
}

TEST(Rot6D, RoundTrip) {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const RotationMatrix r = testing_support::random_rotation(rng);
    EXPECT_LE(max_abs(rot6d_to_matrix(matrix_to_6d(r)).matrix() - r.matrix()), 1e-9);
  }
}

TEST(Rot6D, GramSchmidtInvariances) {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    const Vec3 a(rng.normal(), rng.normal(), rng.normal());
    const Vec3 b(rng.normal(), rng.normal(), rng.normal());
    const Mat3 base = rot6d_to_matrix({a, b}).matrix();
    const double k = rng.uniform(0.1, 10.0);
    const double t = rng.uniform(-3.0, 3.0);
    EXPECT_LE(max_abs(rot6d_to_matrix({k * a, b}).matrix() - base), 1e-12);
    EXPECT_LE(max_abs(rot6d_to_matrix({a, b + t * a}).matrix() - base), 1e-12);
    EXPECT_TRUE(is_rotation(base, 1e-12));
  }
}
