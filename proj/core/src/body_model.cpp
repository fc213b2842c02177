#include "ampkin/body_model.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Geometry>

#include "ampkin/errors.h"
#include "ampkin/random.h"

namespace ampkin {
namespace {

constexpr double kRowSumTolerance = 1e-9;

void check_rows_stochastic(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* name) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if ((m.row(r).array() < 0.0).any()) {
      std::ostringstream os;
      os << name << " row " << r << " has a negative entry";
      throw SchemaError(os.str());
    }
    const double sum = m.row(r).sum();
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << name << " row " << r << " sums to " << sum << ", expected 1";
      throw SchemaError(os.str());
    }
  }
}

Eigen::Matrix4d rigid(const Mat3& r, const Vec3& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = t;
  return m;
}

}  // namespace

void validate_template(const BodyTemplate& tmpl) {
  const Eigen::Index n = tmpl.rest_vertices.rows();
  if (n < 1) {
    throw SchemaError("template has no vertices");
  }
  if (tmpl.skin_weights.rows() != n) {
    throw SchemaError("skin_weights row count does not match vertex count");
  }
  if (tmpl.shape_dirs.rows() != 3 * n) {
    throw SchemaError("shape_dirs row count does not match 3 * vertex count");
  }
  if (tmpl.joint_regressor.cols() != n) {
    throw SchemaError("joint_regressor column count does not match vertex count");
  }
  if (!tmpl.rest_vertices.allFinite() || !tmpl.shape_dirs.allFinite()) {
    throw SchemaError("rest_vertices/shape_dirs contain non-finite values");
  }
  if (!tmpl.skin_weights.allFinite() || !tmpl.joint_regressor.allFinite()) {
    throw SchemaError("skin_weights/joint_regressor contain non-finite values");
  }
  check_rows_stochastic(tmpl.skin_weights, "skin_weights");
  check_rows_stochastic(tmpl.joint_regressor, "joint_regressor");
  if (tmpl.parents[0] != -1) {
    throw SchemaError("parents: joint 0 must be the root (parent -1)");
  }
  for (int j = 1; j < kNumJoints; ++j) {
    const int p = tmpl.parents[static_cast<std::size_t>(j)];
    if (p < 0 || p >= j) {
      throw SchemaError("parents: joint " + std::to_string(j) + " has parent " +
                        std::to_string(p) + ", expected 0 <= parent < joint");
    }
  }
  for (Eigen::Index f = 0; f < tmpl.faces.rows(); ++f) {
    if ((tmpl.faces.row(f).array() < 0).any() || (tmpl.faces.row(f).array() >= n).any()) {
      throw SchemaError("faces: face " + std::to_string(f) + " references a missing vertex");
    }
  }
}

VertexMatrix shape_vertices(const BodyTemplate& tmpl, const ShapeParams& shape) {
  const Eigen::Index n = tmpl.rest_vertices.rows();
  if (tmpl.shape_dirs.rows() != 3 * n) {
    throw DimensionMismatchError("shape_dirs does not match the vertex count");
  }
  if (!shape.betas.allFinite()) {
    throw InvalidInputError("shape parameters must be finite");
  }
  const Eigen::VectorXd offsets = tmpl.shape_dirs * shape.betas;
  VertexMatrix out = tmpl.rest_vertices;
  out += Eigen::Map<const VertexMatrix>(offsets.data(), n, 3);
  return out;
}

JointMatrix regress_joints(const BodyTemplate& tmpl, const VertexMatrix& vertices) {
  if (tmpl.joint_regressor.cols() != vertices.rows()) {
    throw DimensionMismatchError("joint regressor expects " +
                                 std::to_string(tmpl.joint_regressor.cols()) +
                                 " vertices, got " + std::to_string(vertices.rows()));
  }
  return tmpl.joint_regressor * vertices;
}

MeshResult forward(const BodyTemplate& tmpl, const PoseParams& pose, const ShapeParams& shape,
                   const Vec3& root_translation) {
  if (tmpl.skin_weights.rows() != tmpl.rest_vertices.rows()) {
    throw DimensionMismatchError("skin_weights does not match the vertex count");
  }
  const VertexMatrix shaped = shape_vertices(tmpl, shape);
  const JointMatrix rest_joints = regress_joints(tmpl, shaped);

  MeshResult result;
  for (int j = 0; j < kNumJoints; ++j) {
    const int p = tmpl.parents[static_cast<std::size_t>(j)];
    const Mat3& r = pose[j].matrix();
    const Vec3 joint = rest_joints.row(j).transpose();
    auto& world = result.joint_transforms[static_cast<std::size_t>(j)];
    if (p < 0) {
      world = rigid(r, joint + root_translation);
    } else {
      world = result.joint_transforms[static_cast<std::size_t>(p)] *
              rigid(r, joint - rest_joints.row(p).transpose());
    }
  }

  // Skinning transforms: world transform with the rest joint position removed.
  std::array<Eigen::Matrix<double, 3, 4>, kNumJoints> skinning;
  for (int j = 0; j < kNumJoints; ++j) {
    const auto& world = result.joint_transforms[static_cast<std::size_t>(j)];
    auto& a = skinning[static_cast<std::size_t>(j)];
    a.leftCols<3>() = world.topLeftCorner<3, 3>();
    a.col(3) = world.topRightCorner<3, 1>() -
               world.topLeftCorner<3, 3>() * rest_joints.row(j).transpose();
  }

  const Eigen::Index n = shaped.rows();
  result.vertices.resize(n, 3);
  for (Eigen::Index v = 0; v < n; ++v) {
    Eigen::Matrix<double, 3, 4> blended = Eigen::Matrix<double, 3, 4>::Zero();
    for (int j = 0; j < kNumJoints; ++j) {
      const double w = tmpl.skin_weights(v, j);
      if (w != 0.0) {
        blended += w * skinning[static_cast<std::size_t>(j)];
      }
    }
    result.vertices.row(v) =
        (blended.leftCols<3>() * shaped.row(v).transpose() + blended.col(3)).transpose();
  }
  result.joints_posed = regress_joints(tmpl, result.vertices);
  return result;
}

// ---------------------------------------------------------------------------
// Toy template

namespace {

// Rest joint positions in meters, y up, subject facing +z, left side at +x.
const std::array<Vec3, kNumJoints> kToyJoints = {{
    {0.00, 0.95, 0.00},   {0.09, 0.87, 0.00},   {-0.09, 0.87, 0.00},  {0.00, 1.05, -0.01},
    {0.10, 0.50, 0.01},   {-0.10, 0.50, 0.01},  {0.00, 1.18, -0.01},  {0.10, 0.10, -0.02},
    {-0.10, 0.10, -0.02}, {0.00, 1.24, 0.00},   {0.10, 0.03, 0.10},   {-0.10, 0.03, 0.10},
    {0.00, 1.45, -0.01},  {0.07, 1.38, -0.01},  {-0.07, 1.38, -0.01}, {0.00, 1.58, 0.03},
    {0.18, 1.40, -0.02},  {-0.18, 1.40, -0.02}, {0.44, 1.40, -0.03},  {-0.44, 1.40, -0.03},
    {0.68, 1.40, -0.02},  {-0.68, 1.40, -0.02}, {0.77, 1.40, -0.02},  {-0.77, 1.40, -0.02},
}};

// Tube radius of segments driven by each joint.
constexpr std::array<double, kNumJoints> kToyRadius = {
    0.11, 0.065, 0.065, 0.11, 0.05, 0.05, 0.11, 0.04, 0.04, 0.10, 0.035, 0.035,
    0.05, 0.05,  0.05,  0.09, 0.045, 0.045, 0.038, 0.038, 0.03, 0.03, 0.03, 0.03};

struct Segment {
  Vec3 start;
  Vec3 end;
  int driver;  // joint whose transform moves this segment
  double radius;
};

std::vector<Segment> toy_segments() {
  std::vector<Segment> segs;
  for (int j = 1; j < kNumJoints; ++j) {
    const int p = kSmplParents[static_cast<std::size_t>(j)];
    segs.push_back({kToyJoints[static_cast<std::size_t>(p)], kToyJoints[static_cast<std::size_t>(j)],
                    p, kToyRadius[static_cast<std::size_t>(p)]});
  }
  // Leaf caps extend past the end joints.
  for (int j = 0; j < kNumJoints; ++j) {
    if (!children(kSmplParents, j).empty()) {
      continue;
    }
    const Vec3& at = kToyJoints[static_cast<std::size_t>(j)];
    const Vec3 dir = (at - kToyJoints[static_cast<std::size_t>(kSmplParents[static_cast<std::size_t>(j)])])
                         .normalized();
    const double length = j == kHead ? 0.16 : 0.07;
    segs.push_back({at, at + length * dir, j, kToyRadius[static_cast<std::size_t>(j)]});
  }
  return segs;
}

double point_segment_distance(const Vec3& x, const Segment& s) {
  const Vec3 d = s.end - s.start;
  const double t = std::clamp((x - s.start).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (x - (s.start + t * d)).norm();
}

// Largest-remainder split of n vertices proportional to segment length.
std::vector<int> allocate_vertices(const std::vector<Segment>& segs, int n) {
  std::vector<double> lengths;
  for (const auto& s : segs) {
    lengths.push_back((s.end - s.start).norm());
  }
  const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
  std::vector<int> counts(segs.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double exact = n * lengths[i] / total;
    counts[i] = static_cast<int>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - counts[i], i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int k = 0; k < n - assigned; ++k) {
    ++counts[remainders[static_cast<std::size_t>(k)].second];
  }
  return counts;
}

constexpr int kRingSize = 8;
constexpr double kFalloffSigma = 0.02;
constexpr double kFalloffCutoff = 0.06;
constexpr int kRegressorNeighbors = 8;

}  // namespace

BodyTemplate make_toy_template(int n_vertices, std::uint64_t seed) {
  if (n_vertices < kNumJoints) {
    throw InvalidInputError("toy template needs at least 24 vertices, got " +
                            std::to_string(n_vertices));
  }
  const auto segs = toy_segments();
  const auto counts = allocate_vertices(segs, n_vertices);

  BodyTemplate tmpl;
  for (int j = 0; j < kNumJoints; ++j) {
    tmpl.joint_names[static_cast<std::size_t>(j)] = std::string(kSmplJointNames[static_cast<std::size_t>(j)]);
  }
  tmpl.rest_vertices.resize(n_vertices, 3);
  std::vector<std::array<std::int32_t, 3>> faces;

  int next = 0;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const Segment& seg = segs[s];
    const Vec3 axis = (seg.end - seg.start).normalized();
    const Vec3 helper = std::abs(axis.y()) < 0.9 ? Vec3::UnitY() : Vec3::UnitX();
    const Vec3 u = axis.cross(helper).normalized();
    const Vec3 w = axis.cross(u);
    const int count = counts[s];
    const int first = next;
    for (int k = 0; k < count; ++k) {
      const double t = (k + 0.5) / count;
      const double phi = 2.0 * std::numbers::pi * k / kRingSize;
      const Vec3 p = seg.start + t * (seg.end - seg.start) +
                     seg.radius * (std::cos(phi) * u + std::sin(phi) * w);
      tmpl.rest_vertices.row(next++) = p.transpose();
    }
    for (int k = 0; k + kRingSize < count; ++k) {
      faces.push_back({first + k, first + k + 1, first + k + kRingSize});
      if (k + kRingSize + 1 < count) {
        faces.push_back({first + k + 1, first + k + kRingSize + 1, first + k + kRingSize});
      }
    }
  }
  tmpl.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (int c = 0; c < 3; ++c) {
      tmpl.faces(static_cast<Eigen::Index>(f), c) = faces[f][static_cast<std::size_t>(c)];
    }
  }

  // Skin weights: smooth compact falloff over the nearest bones.
  tmpl.skin_weights = SkinWeights::Zero(n_vertices, kNumJoints);
  for (int v = 0; v < n_vertices; ++v) {
    const Vec3 x = tmpl.rest_vertices.row(v).transpose();
    std::vector<double> dist(segs.size());
    for (std::size_t s = 0; s < segs.size(); ++s) {
      dist[s] = point_segment_distance(x, segs[s]);
    }
    const double nearest = *std::min_element(dist.begin(), dist.end());
    for (std::size_t s = 0; s < segs.size(); ++s) {
      const double excess = dist[s] - nearest;
      if (excess >= kFalloffCutoff) {
        continue;
      }
      const double taper_x = 1.0 - excess / kFalloffCutoff;
      const double taper = taper_x * taper_x * (3.0 - 2.0 * taper_x);
      tmpl.skin_weights(v, segs[s].driver) +=
          std::exp(-excess * excess / (2.0 * kFalloffSigma * kFalloffSigma)) * taper;
    }
    tmpl.skin_weights.row(v) /= tmpl.skin_weights.row(v).sum();
  }

  // Joint regressor: uniform average of the k nearest rest vertices.
  const int k = std::min(kRegressorNeighbors, n_vertices);
  tmpl.joint_regressor = JointRegressor::Zero(kNumJoints, n_vertices);
  std::vector<int> order(static_cast<std::size_t>(n_vertices));
  for (int j = 0; j < kNumJoints; ++j) {
    const Vec3& joint = kToyJoints[static_cast<std::size_t>(j)];
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return (tmpl.rest_vertices.row(a).transpose() - joint).squaredNorm() <
             (tmpl.rest_vertices.row(b).transpose() - joint).squaredNorm();
    });
    for (int i = 0; i < k; ++i) {
      tmpl.joint_regressor(j, order[static_cast<std::size_t>(i)]) = 1.0 / k;
    }
  }

  // Shape directions: one smooth sinusoidal displacement field per beta.
  Rng rng(seed);
  tmpl.shape_dirs.resize(3 * n_vertices, kNumBetas);
  for (int b = 0; b < kNumBetas; ++b) {
    std::array<double, 3> amplitude{};
    std::array<Vec3, 3> frequency;
    std::array<double, 3> phase{};
    for (int c = 0; c < 3; ++c) {
      amplitude[static_cast<std::size_t>(c)] = rng.uniform(-0.01, 0.01);
      frequency[static_cast<std::size_t>(c)] =
          Vec3(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
      phase[static_cast<std::size_t>(c)] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    for (int v = 0; v < n_vertices; ++v) {
      const Vec3 x = tmpl.rest_vertices.row(v).transpose();
      for (int c = 0; c < 3; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        tmpl.shape_dirs(3 * v + c, b) =
            amplitude[cc] * std::sin(frequency[cc].dot(x) + phase[cc]);
      }
    }
  }

  validate_template(tmpl);
  return tmpl;
}

}  // namespace ampkin
