#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ampkin/rotations.h"
#include "ampkin/skeleton.h"

namespace ampkin {

using RowMajorX3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using VertexMatrix = RowMajorX3;
using JointMatrix = Eigen::Matrix<double, kNumJoints, 3, Eigen::RowMajor>;
using SkinWeights = Eigen::Matrix<double, Eigen::Dynamic, kNumJoints, Eigen::RowMajor>;
using JointRegressor = Eigen::Matrix<double, kNumJoints, Eigen::Dynamic, Eigen::RowMajor>;
/// (3N) x 10; row 3*v + c holds the per-beta displacement of coordinate c of vertex v.
using ShapeDirs = Eigen::Matrix<double, Eigen::Dynamic, kNumBetas, Eigen::RowMajor>;
using FaceMatrix = Eigen::Matrix<std::int32_t, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Rest-pose body template: everything forward() needs besides pose and shape.
struct BodyTemplate {
  VertexMatrix rest_vertices;
  SkinWeights skin_weights;
  ShapeDirs shape_dirs;
  JointRegressor joint_regressor;
  std::array<int, kNumJoints> parents = kSmplParents;
  std::array<std::string, kNumJoints> joint_names;
  /// Triangle list used only for OBJ export and rendering.
  FaceMatrix faces;

  [[nodiscard]] int num_vertices() const { return static_cast<int>(rest_vertices.rows()); }
};

/// Throws SchemaError naming the first violated invariant (weights, regressor, tree, finiteness).
void validate_template(const BodyTemplate& tmpl);

/// Per-joint local rotations; entry 0 is the global orientation.
struct PoseParams {
  std::array<RotationMatrix, kNumJoints> rotations;

  static PoseParams identity() { return {}; }
  RotationMatrix& operator[](int j) { return rotations[static_cast<std::size_t>(j)]; }
  const RotationMatrix& operator[](int j) const { return rotations[static_cast<std::size_t>(j)]; }
  friend bool operator==(const PoseParams&, const PoseParams&) = default;
};

struct ShapeParams {
  Eigen::Matrix<double, kNumBetas, 1> betas = Eigen::Matrix<double, kNumBetas, 1>::Zero();
  friend bool operator==(const ShapeParams&, const ShapeParams&) = default;
};

struct MeshResult {
  VertexMatrix vertices;
  /// Joints regressed from the posed vertices.
  JointMatrix joints_posed;
  /// World transform of each joint. Zero-masked joints have a zero rotation block.
  std::array<Eigen::Matrix4d, kNumJoints> joint_transforms;
};

/// rest_vertices + sum_k beta_k * shape_dirs[:, :, k].
[[nodiscard]] VertexMatrix shape_vertices(const BodyTemplate& tmpl, const ShapeParams& shape);

/// joint_regressor * vertices.
[[nodiscard]] JointMatrix regress_joints(const BodyTemplate& tmpl, const VertexMatrix& vertices);

/// Forward kinematics plus linear blend skinning.
///
/// Rest joints come from the regressor applied to the shaped mesh. Each
/// joint's world transform is its parent's world transform times a local
/// transform made of the joint rotation and the rest offset to the parent.
/// A zero rotation therefore zeroes the rotation block of the joint and of
/// every descendant, and vertices skinned only to that subtree land on the
/// joint's translation. `root_translation` is added to the root transform.
[[nodiscard]] MeshResult forward(const BodyTemplate& tmpl, const PoseParams& pose,
                                 const ShapeParams& shape,
                                 const Vec3& root_translation = Vec3::Zero());

/// Procedural 24-joint mannequin: helical tube vertices along the bones,
/// nearest-bone skin weights with a smooth compact falloff, k-nearest
/// vertex joint regressor and smooth random shape fields. Deterministic in
/// (n_vertices, seed). Throws InvalidInputError when n_vertices < 24.
[[nodiscard]] BodyTemplate make_toy_template(int n_vertices = 512, std::uint64_t seed = 0);

/// Binary template file ("AMPKIN01"). Loading validates all invariants.
void save_template(const BodyTemplate& tmpl, const std::filesystem::path& path);
void write_template(const BodyTemplate& tmpl, std::ostream& out);
[[nodiscard]] BodyTemplate load_template(const std::filesystem::path& path);
[[nodiscard]] BodyTemplate read_template(std::istream& in);

/// Wavefront OBJ: "v x y z" lines, then 1-based "f a b c" lines.
void write_obj(const VertexMatrix& vertices, const FaceMatrix& faces, std::ostream& out);
void save_obj(const VertexMatrix& vertices, const FaceMatrix& faces,
              const std::filesystem::path& path);

}  // namespace ampkin
