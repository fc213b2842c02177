#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ampkin/amputation.h"
#include "ampkin/body_model.h"

namespace ampkin {

/// K points plus the subset that takes part in a metric.
struct JointSet {
  RowMajorX3 points;
  std::vector<bool> valid;

  static JointSet all_valid(const RowMajorX3& points);
  [[nodiscard]] int num_valid() const;
};

/// Mean Euclidean distance over valid joints after centering both sets on
/// their `root` joint. Throws InvalidInputError when no joint is valid or
/// the masks differ.
[[nodiscard]] double mpjpe(const JointSet& pred, const JointSet& gt, int root = kPelvis);

/// Mean per-vertex distance after centering each mesh on its regressed
/// pelvis. `include` (optional, one flag per vertex) restricts the mean.
[[nodiscard]] double mve(const VertexMatrix& pred, const VertexMatrix& gt,
                         const BodyTemplate& tmpl, std::span<const bool> include = {});

/// Vertices whose dominant skin weight lies outside every amputated subtree.
[[nodiscard]] std::vector<bool> surviving_vertices(const BodyTemplate& tmpl,
                                                   const AmputationLabel& label);

struct SimilarityTransform {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  [[nodiscard]] RowMajorX3 apply(const RowMajorX3& points) const;
};

/// Least-squares similarity (or rigid, with_scale = false) transform
/// taking `source` onto `target` over the valid rows. Reflections are
/// excluded. Throws DegenerateGeometryError on fewer than three valid
/// points or a coincident/collinear configuration.
[[nodiscard]] SimilarityTransform procrustes_align(const RowMajorX3& source,
                                                   const RowMajorX3& target,
                                                   const std::vector<bool>& valid,
                                                   bool with_scale = true);

/// MPJPE after Procrustes alignment of `pred` onto `gt`.
[[nodiscard]] double pa_mpjpe(const JointSet& pred, const JointSet& gt, bool with_scale = true);

// ---------------------------------------------------------------------------
// Losses

/// Sum over the four limb heads of -log softmax(h_p)[true class].
[[nodiscard]] double cross_entropy_cls(const std::array<LimbLogits, kNumLimbs>& heads,
                                       const AmputationLabel& label);

struct LossWeights {
  double theta = 1e-3;
  double beta = 5e-4;
  double kp2d = 1e-2;
  double kp3d = 5e-2;
  double cls = 1e-2;

  /// Throws InvalidInputError on negative or non-finite weights.
  void validate() const;
};

struct LossComponents {
  double theta = 0.0;
  double beta = 0.0;
  double kp2d = 0.0;
  double kp3d = 0.0;
  double cls = 0.0;
};

/// Weighted sum of the supervised terms, accumulated in the order
/// theta, beta, 2D, 3D, cls. Throws InvalidInputError on a negative component.
[[nodiscard]] double overall_loss(const LossComponents& c, const LossWeights& w = {});

/// Sum of squared differences between 6D encodings of the two poses.
[[nodiscard]] double pose_loss_6d(const PoseParams& pred, const PoseParams& gt);
[[nodiscard]] double shape_loss(const ShapeParams& pred, const ShapeParams& gt);
[[nodiscard]] double joint3d_loss(const RowMajorX3& pred, const RowMajorX3& gt);

enum class KeypointNormalization { kBbox, kImage, kNone };

/// Divisor for 2D residuals: longer bbox side, longer image side, or 1.
[[nodiscard]] double keypoint_normalizer(KeypointNormalization mode,
                                         const std::array<double, 4>& bbox, int image_width,
                                         int image_height);

/// Sum of squared normalized 2D residuals over keypoints with confidence > 0.
/// `pred` is J x 2 (or J x 3; extra columns ignored).
[[nodiscard]] double keypoint2d_loss(const Eigen::Ref<const Eigen::MatrixXd>& pred,
                                     const Keypoints2D& gt, double normalizer);

// ---------------------------------------------------------------------------
// Confusion statistics

/// Square count matrix: rows are true classes, columns predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int classes);
  /// Throws InvalidInputError on a non-square or negative matrix.
  static ConfusionMatrix from_counts(const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts);

  void add(int truth, int predicted, std::int64_t n = 1);
  [[nodiscard]] int classes() const { return static_cast<int>(counts_.rows()); }
  [[nodiscard]] std::int64_t total() const { return counts_.sum(); }
  [[nodiscard]] const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts() const {
    return counts_;
  }

 private:
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts_;
};

struct ConfusionStats {
  double accuracy = 0.0;
  Eigen::VectorXd precision;
  Eigen::VectorXd recall;
  Eigen::VectorXd f1;
  /// Set where the corresponding denominator was zero (value reported as 0).
  std::vector<bool> precision_undefined;
  std::vector<bool> recall_undefined;
  std::vector<bool> f1_undefined;
  double macro_f1 = 0.0;
  /// 100 * count / column total; each non-empty predicted column sums to 100.
  Eigen::MatrixXd column_percent;
};

/// Throws InvalidInputError when the matrix is empty.
[[nodiscard]] ConfusionStats confusion_stats(const ConfusionMatrix& cm);

}  // namespace ampkin
