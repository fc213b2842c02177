#include "ampkin/metrics.h"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "ampkin/errors.h"

namespace ampkin {
namespace {

constexpr double kCollinearRatio = 1e-9;

void check_pair(const JointSet& pred, const JointSet& gt) {
  if (pred.points.rows() != gt.points.rows()) {
    throw DimensionMismatchError("joint sets differ in size");
  }
  if (pred.valid.size() != static_cast<std::size_t>(pred.points.rows()) ||
      gt.valid.size() != static_cast<std::size_t>(gt.points.rows())) {
    throw DimensionMismatchError("valid mask length differs from joint count");
  }
  if (pred.valid != gt.valid) {
    throw InvalidInputError("prediction and ground truth use different valid masks");
  }
  if (pred.num_valid() == 0) {
    throw InvalidInputError("no valid joints to evaluate");
  }
}

double mean_distance(const RowMajorX3& a, const RowMajorX3& b, const std::vector<bool>& valid) {
  double sum = 0.0;
  int n = 0;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    if (valid[static_cast<std::size_t>(k)]) {
      sum += (a.row(k) - b.row(k)).norm();
      ++n;
    }
  }
  return sum / n;
}

void check_spread(const Eigen::Matrix<double, Eigen::Dynamic, 3>& centered, const char* which) {
  const Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 3>> svd(centered);
  const auto& s = svd.singularValues();
  if (!(s[0] > 0.0) || s[1] <= kCollinearRatio * s[0]) {
    throw DegenerateGeometryError(std::string(which) +
                                  " points are coincident or collinear; alignment undefined");
  }
}

}  // namespace

JointSet JointSet::all_valid(const RowMajorX3& points) {
  return {points, std::vector<bool>(static_cast<std::size_t>(points.rows()), true)};
}

int JointSet::num_valid() const {
  int n = 0;
  for (bool v : valid) n += v ? 1 : 0;
  return n;
}

double mpjpe(const JointSet& pred, const JointSet& gt, int root) {
  check_pair(pred, gt);
  if (root < 0 || root >= pred.points.rows()) {
    throw InvalidInputError("root joint index out of range");
  }
  const RowMajorX3 p = pred.points.rowwise() - pred.points.row(root);
  const RowMajorX3 g = gt.points.rowwise() - gt.points.row(root);
  return mean_distance(p, g, pred.valid);
}

double mve(const VertexMatrix& pred, const VertexMatrix& gt, const BodyTemplate& tmpl,
           std::span<const bool> include) {
  if (pred.rows() != gt.rows() || pred.rows() != tmpl.joint_regressor.cols()) {
    throw DimensionMismatchError("vertex counts of prediction, ground truth and template differ");
  }
  if (!include.empty() && include.size() != static_cast<std::size_t>(pred.rows())) {
    throw DimensionMismatchError("vertex mask length differs from vertex count");
  }
  const Eigen::RowVector3d pred_root = tmpl.joint_regressor.row(kPelvis) * pred;
  const Eigen::RowVector3d gt_root = tmpl.joint_regressor.row(kPelvis) * gt;
  double sum = 0.0;
  int n = 0;
  for (Eigen::Index v = 0; v < pred.rows(); ++v) {
    if (!include.empty() && !include[static_cast<std::size_t>(v)]) {
      continue;
    }
    sum += ((pred.row(v) - pred_root) - (gt.row(v) - gt_root)).norm();
    ++n;
  }
  if (n == 0) {
    throw InvalidInputError("no vertices selected for MVE");
  }
  return sum / n;
}

std::vector<bool> surviving_vertices(const BodyTemplate& tmpl, const AmputationLabel& label) {
  const auto removed = amputated_joints(label);
  std::vector<bool> out(static_cast<std::size_t>(tmpl.num_vertices()));
  for (Eigen::Index v = 0; v < tmpl.skin_weights.rows(); ++v) {
    Eigen::Index dominant = 0;
    tmpl.skin_weights.row(v).maxCoeff(&dominant);
    out[static_cast<std::size_t>(v)] = removed.count(static_cast<int>(dominant)) == 0;
  }
  return out;
}

RowMajorX3 SimilarityTransform::apply(const RowMajorX3& points) const {
  RowMajorX3 out = (scale * (points * rotation.transpose())).rowwise() + translation.transpose();
  return out;
}

SimilarityTransform procrustes_align(const RowMajorX3& source, const RowMajorX3& target,
                                     const std::vector<bool>& valid, bool with_scale) {
  if (source.rows() != target.rows() || valid.size() != static_cast<std::size_t>(source.rows())) {
    throw DimensionMismatchError("alignment inputs differ in size");
  }
  int n = 0;
  for (bool v : valid) n += v ? 1 : 0;
  if (n < 3) {
    throw DegenerateGeometryError("Procrustes alignment needs at least 3 valid points");
  }
  Eigen::Matrix<double, Eigen::Dynamic, 3> x(n, 3);
  Eigen::Matrix<double, Eigen::Dynamic, 3> y(n, 3);
  for (Eigen::Index k = 0, r = 0; k < source.rows(); ++k) {
    if (valid[static_cast<std::size_t>(k)]) {
      x.row(r) = source.row(k);
      y.row(r) = target.row(k);
      ++r;
    }
  }
  const Eigen::RowVector3d mu_x = x.colwise().mean();
  const Eigen::RowVector3d mu_y = y.colwise().mean();
  x.rowwise() -= mu_x;
  y.rowwise() -= mu_y;
  check_spread(x, "source");
  check_spread(y, "target");

  const Mat3 cross_cov = y.transpose() * x;
  const Eigen::JacobiSVD<Mat3> svd(cross_cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3 d = Vec3::Ones();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
    d[2] = -1.0;
  }
  SimilarityTransform t;
  t.rotation = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
  if (with_scale) {
    t.scale = svd.singularValues().dot(d) / x.squaredNorm();
  }
  t.translation = mu_y.transpose() - t.scale * t.rotation * mu_x.transpose();
  return t;
}

double pa_mpjpe(const JointSet& pred, const JointSet& gt, bool with_scale) {
  check_pair(pred, gt);
  const SimilarityTransform t = procrustes_align(pred.points, gt.points, pred.valid, with_scale);
  if (pred.points == gt.points) {
    // identity is the exact optimum; avoid SVD round-off
    return 0.0;
  }
  return mean_distance(t.apply(pred.points), gt.points, pred.valid);
}

}  // namespace ampkin
