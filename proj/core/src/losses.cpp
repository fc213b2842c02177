#include <algorithm>
#include <cmath>

#include "ampkin/errors.h"
#include "ampkin/metrics.h"

namespace ampkin {
namespace {

void check_component(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw InvalidInputError(std::string("loss component ") + name + " must be finite and >= 0");
  }
}

}  // namespace

double cross_entropy_cls(const std::array<LimbLogits, kNumLimbs>& heads,
                         const AmputationLabel& label) {
  double total = 0.0;
  for (std::size_t p = 0; p < kNumLimbs; ++p) {
    const LimbLogits& h = heads[p];
    if (!h.allFinite()) {
      throw InvalidInputError("limb logits must be finite");
    }
    const double peak = h.maxCoeff();
    const double log_sum_exp = peak + std::log((h.array() - peak).exp().sum());
    total += log_sum_exp - h[label.levels()[p]];
  }
  return total;
}

void LossWeights::validate() const {
  for (double w : {theta, beta, kp2d, kp3d, cls}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidInputError("loss weights must be finite and non-negative");
    }
  }
}

double overall_loss(const LossComponents& c, const LossWeights& w) {
  w.validate();
  check_component(c.theta, "theta");
  check_component(c.beta, "beta");
  check_component(c.kp2d, "kp2d");
  check_component(c.kp3d, "kp3d");
  check_component(c.cls, "cls");
  double total = w.theta * c.theta;
  total += w.beta * c.beta;
  total += w.kp2d * c.kp2d;
  total += w.kp3d * c.kp3d;
  total += w.cls * c.cls;
  return total;
}

double pose_loss_6d(const PoseParams& pred, const PoseParams& gt) {
  double total = 0.0;
  for (int j = 0; j < kNumJoints; ++j) {
    const Rot6D a = matrix_to_6d(pred[j]);
    const Rot6D b = matrix_to_6d(gt[j]);
    total += (a.a - b.a).squaredNorm() + (a.b - b.b).squaredNorm();
  }
  return total;
}

double shape_loss(const ShapeParams& pred, const ShapeParams& gt) {
  return (pred.betas - gt.betas).squaredNorm();
}

double joint3d_loss(const RowMajorX3& pred, const RowMajorX3& gt) {
  if (pred.rows() != gt.rows()) {
    throw DimensionMismatchError("3D joint sets differ in size");
  }
  return (pred - gt).squaredNorm();
}

double keypoint_normalizer(KeypointNormalization mode, const std::array<double, 4>& bbox,
                           int image_width, int image_height) {
  switch (mode) {
    case KeypointNormalization::kBbox:
      return std::max(bbox[2], bbox[3]);
    case KeypointNormalization::kImage:
      return static_cast<double>(std::max(image_width, image_height));
    case KeypointNormalization::kNone:
      return 1.0;
  }
  return 1.0;
}

double keypoint2d_loss(const Eigen::Ref<const Eigen::MatrixXd>& pred, const Keypoints2D& gt,
                       double normalizer) {
  if (pred.rows() != gt.rows() || pred.cols() < 2) {
    throw DimensionMismatchError("2D keypoint sets differ in size");
  }
  if (!(normalizer > 0.0)) {
    throw InvalidInputError("keypoint normalizer must be positive");
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j < gt.rows(); ++j) {
    if (gt(j, 2) <= 0.0) {
      continue;
    }
    const double dx = (pred(j, 0) - gt(j, 0)) / normalizer;
    const double dy = (pred(j, 1) - gt(j, 1)) / normalizer;
    total += dx * dx + dy * dy;
  }
  return total;
}

ConfusionMatrix::ConfusionMatrix(int classes) {
  if (classes < 1) {
    throw InvalidInputError("confusion matrix needs at least one class");
  }
  counts_ = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(classes, classes);
}

ConfusionMatrix ConfusionMatrix::from_counts(
    const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts) {
  if (counts.rows() != counts.cols() || counts.rows() < 1) {
    throw InvalidInputError("confusion matrix must be square and non-empty");
  }
  if ((counts.array() < 0).any()) {
    throw InvalidInputError("confusion counts must be non-negative");
  }
  ConfusionMatrix cm(static_cast<int>(counts.rows()));
  cm.counts_ = counts;
  return cm;
}

void ConfusionMatrix::add(int truth, int predicted, std::int64_t n) {
  if (truth < 0 || truth >= classes() || predicted < 0 || predicted >= classes()) {
    throw InvalidInputError("class index out of range");
  }
  if (n < 0) {
    throw InvalidInputError("confusion counts must be non-negative");
  }
  counts_(truth, predicted) += n;
}

ConfusionStats confusion_stats(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total <= 0) {
    throw InvalidInputError("confusion matrix is empty");
  }
  const int c = cm.classes();
  const auto& counts = cm.counts();
  ConfusionStats s;
  s.accuracy = static_cast<double>(counts.trace()) / static_cast<double>(total);
  s.precision = Eigen::VectorXd::Zero(c);
  s.recall = Eigen::VectorXd::Zero(c);
  s.f1 = Eigen::VectorXd::Zero(c);
  s.precision_undefined.assign(static_cast<std::size_t>(c), false);
  s.recall_undefined.assign(static_cast<std::size_t>(c), false);
  s.f1_undefined.assign(static_cast<std::size_t>(c), false);
  s.column_percent = Eigen::MatrixXd::Zero(c, c);
  for (int k = 0; k < c; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const auto col = counts.col(k).sum();
    const auto row = counts.row(k).sum();
    const auto hit = static_cast<double>(counts(k, k));
    if (col > 0) {
      s.precision[k] = hit / static_cast<double>(col);
      for (int r = 0; r < c; ++r) {
        s.column_percent(r, k) = 100.0 * static_cast<double>(counts(r, k)) / static_cast<double>(col);
      }
    } else {
      s.precision_undefined[idx] = true;
    }
    if (row > 0) {
      s.recall[k] = hit / static_cast<double>(row);
    } else {
      s.recall_undefined[idx] = true;
    }
    const double denom = s.precision[k] + s.recall[k];
    if (denom > 0.0) {
      s.f1[k] = 2.0 * s.precision[k] * s.recall[k] / denom;
    } else {
      s.f1_undefined[idx] = true;
    }
  }
  s.macro_f1 = s.f1.mean();
  return s;
}

}  // namespace ampkin
