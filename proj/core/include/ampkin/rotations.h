#pragma once

#include <Eigen/Core>

namespace ampkin {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Tolerance used when validating orthonormality and det = +1.
inline constexpr double kRotationTolerance = 1e-9;
/// Minimum column norm / cross-product norm accepted by the 6D decoder.
inline constexpr double kRot6dEpsilon = 1e-8;

/// A joint rotation: either a proper rotation matrix, or the exact zero
/// matrix used as the in-band amputation sentinel. Nothing else can be
/// constructed.
class RotationMatrix {
 public:
  /// Identity rotation.
  RotationMatrix() : m_(Mat3::Identity()) {}

  /// Validates `m`: throws InvalidInputError unless it is a rotation within
  /// `tol` or exactly zero.
  static RotationMatrix from_matrix(const Mat3& m, double tol = kRotationTolerance);
  static RotationMatrix identity() { return RotationMatrix(); }
  static RotationMatrix zero();

  [[nodiscard]] const Mat3& matrix() const noexcept { return m_; }
  [[nodiscard]] bool is_zero() const noexcept;

  friend bool operator==(const RotationMatrix& a, const RotationMatrix& b) { return a.m_ == b.m_; }

 private:
  explicit RotationMatrix(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

/// Rotation vector: direction is the axis, norm the angle in radians.
struct AxisAngle {
  Vec3 v = Vec3::Zero();
};

/// First two columns of a rotation matrix.
struct Rot6D {
  Vec3 a = Vec3::UnitX();
  Vec3 b = Vec3::UnitY();
};

[[nodiscard]] bool is_rotation(const Mat3& m, double tol = kRotationTolerance);

/// Rodrigues' formula. Throws InvalidInputError on non-finite input.
[[nodiscard]] RotationMatrix axis_angle_to_matrix(const AxisAngle& aa);

/// Inverse of axis_angle_to_matrix, canonicalized so the angle lies in
/// [0, pi]. Throws DegenerateRepresentationError on the zero sentinel.
[[nodiscard]] AxisAngle matrix_to_axis_angle(const RotationMatrix& r);

/// Angle folded into [0, pi] with the sign carried by the axis.
[[nodiscard]] AxisAngle canonicalize(const AxisAngle& aa);

/// Throws DegenerateRepresentationError on the zero sentinel.
[[nodiscard]] Rot6D matrix_to_6d(const RotationMatrix& r);

/// Gram-Schmidt decode. Throws DegenerateRepresentationError when `a` is
/// shorter than kRot6dEpsilon or `a`, `b` are parallel within it.
[[nodiscard]] RotationMatrix rot6d_to_matrix(const Rot6D& x);

}  // namespace ampkin
