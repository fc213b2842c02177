#include "ampkin/rotations.h"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "ampkin/errors.h"

namespace ampkin {

RotationMatrix RotationMatrix::zero() { return RotationMatrix(Mat3::Zero()); }

bool RotationMatrix::is_zero() const noexcept { return (m_.array() == 0.0).all(); }

RotationMatrix RotationMatrix::from_matrix(const Mat3& m, double tol) {
  if (!m.allFinite()) {
    throw InvalidInputError("rotation matrix has non-finite entries");
  }
  if ((m.array() == 0.0).all()) {
    return zero();
  }
  if (!is_rotation(m, tol)) {
    throw InvalidInputError("matrix is neither a proper rotation nor the zero sentinel");
  }
  return RotationMatrix(m);
}

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) {
    return false;
  }
  const double ortho = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

RotationMatrix axis_angle_to_matrix(const AxisAngle& aa) {
  if (!aa.v.allFinite()) {
    throw InvalidInputError("axis-angle has non-finite components");
  }
  const double angle = aa.v.norm();
  Mat3 r = Mat3::Identity();
  if (angle == 0.0) {
    return RotationMatrix::from_matrix(r);
  }
  const Vec3 k = aa.v / angle;
  Mat3 kx;
  kx << 0.0, -k.z(), k.y(),
        k.z(), 0.0, -k.x(),
        -k.y(), k.x(), 0.0;
  r += std::sin(angle) * kx + (1.0 - std::cos(angle)) * (kx * kx);
  // Rodrigues output is orthonormal to rounding; validate loosely.
  return RotationMatrix::from_matrix(r, 1e-12 * (1.0 + angle));
}

AxisAngle canonicalize(const AxisAngle& aa) {
  const double angle = aa.v.norm();
  if (angle == 0.0 || !std::isfinite(angle)) {
    return aa;
  }
  const Vec3 axis = aa.v / angle;
  double wrapped = std::fmod(angle, 2.0 * std::numbers::pi);
  if (wrapped <= std::numbers::pi) {
    return {axis * wrapped};
  }
  // theta in (pi, 2pi) about k is (2pi - theta) about -k.
  return {-axis * (2.0 * std::numbers::pi - wrapped)};
}

AxisAngle matrix_to_axis_angle(const RotationMatrix& r) {
  if (r.is_zero()) {
    throw DegenerateRepresentationError("zero-matrix sentinel has no axis-angle form");
  }
  // Eigen goes through a quaternion, which stays accurate near angle = pi.
  const Eigen::AngleAxisd aa(r.matrix());
  return canonicalize({aa.axis() * aa.angle()});
}

Rot6D matrix_to_6d(const RotationMatrix& r) {
  if (r.is_zero()) {
    throw DegenerateRepresentationError(
        "zero-matrix sentinel cannot be encoded in the 6D representation");
  }
  return {r.matrix().col(0), r.matrix().col(1)};
}

RotationMatrix rot6d_to_matrix(const Rot6D& x) {
  if (!x.a.allFinite() || !x.b.allFinite()) {
    throw DegenerateRepresentationError("6D rotation has non-finite components");
  }
  const double a_norm = x.a.norm();
  if (a_norm <= kRot6dEpsilon) {
    throw DegenerateRepresentationError("6D rotation: first column is (near) zero");
  }
  const Vec3 c0 = x.a / a_norm;
  const Vec3 b_perp = x.b - c0.dot(x.b) * c0;
  const double b_norm = b_perp.norm();
  if (b_norm <= kRot6dEpsilon * std::max(1.0, x.b.norm())) {
    throw DegenerateRepresentationError("6D rotation: columns are (near) parallel");
  }
  const Vec3 c1 = b_perp / b_norm;
  Mat3 m;
  m.col(0) = c0;
  m.col(1) = c1;
  m.col(2) = c0.cross(c1);
  return RotationMatrix::from_matrix(m, 1e-12);
}

}  // namespace ampkin
