#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ampkin/amputation.h"
#include "ampkin/body_model.h"
#include "ampkin/image.h"

namespace ampkin {

using RowMajorX2 = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

struct ImageSize {
  int width = 256;
  int height = 256;
};

/// Scaled orthographic camera in normalized image units.
struct WeakPerspectiveCamera {
  double s = 1.0;
  double tx = 0.0;
  double ty = 0.0;

  /// Throws InvalidInputError unless s > 0 and all values are finite.
  void validate() const;
  friend bool operator==(const WeakPerspectiveCamera&, const WeakPerspectiveCamera&) = default;
};

/// u = s (X + tx), v = s (Y + ty), mapped to pixels by (u + 1) / 2 * W and
/// (v + 1) / 2 * H. Depth is ignored.
[[nodiscard]] RowMajorX2 project_weak_perspective(const RowMajorX3& points,
                                                  const WeakPerspectiveCamera& cam,
                                                  ImageSize size);

/// Same projection into a bounding box (x, y, w, h) of a larger image.
[[nodiscard]] RowMajorX2 project_to_bbox(const RowMajorX3& points, const WeakPerspectiveCamera& cam,
                                         const std::array<double, 4>& bbox);

/// H x W x J Gaussian keypoint maps, stored row-major in that order.
struct HeatmapStack {
  int height = 0;
  int width = 0;
  int joints = 0;
  double sigma = 0.0;
  std::vector<double> values;

  [[nodiscard]] double at(int y, int x, int j) const {
    return values[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
                      static_cast<std::size_t>(joints) +
                  static_cast<std::size_t>(j)];
  }
  /// Maximum value of channel j.
  [[nodiscard]] double channel_max(int j) const;
  /// Sum of channel j.
  [[nodiscard]] double channel_sum(int j) const;
};

inline constexpr double kDefaultHeatmapSigma = 2.0;

/// Channel j = exp(-((x - x_j)^2 + (y - y_j)^2) / (2 sigma^2)) sampled at
/// integer pixel centers; channels with confidence 0 stay zero.
[[nodiscard]] HeatmapStack rasterize_heatmaps(const Keypoints2D& kps, ImageSize size,
                                              double sigma = kDefaultHeatmapSigma);

void write_heatmaps(const HeatmapStack& hm, std::ostream& out);
[[nodiscard]] HeatmapStack read_heatmaps(std::istream& in);

/// How the ratio of the keypoint-noise ablation is read.
enum class NoiseModel {
  /// Perturb floor(ratio * visible) randomly chosen visible keypoints by sigma_px.
  kFraction,
  /// Perturb every visible keypoint with std ratio * sigma_px.
  kMagnitude,
};

/// 0.05 times the bbox diagonal.
[[nodiscard]] double default_noise_sigma(const std::array<double, 4>& bbox);

/// Seeded isotropic Gaussian noise on visible (conf > 0) keypoints. Hidden
/// keypoints are never touched. Throws InvalidInputError unless
/// ratio is in [0, 1] and sigma_px >= 0.
[[nodiscard]] Keypoints2D inject_keypoint_noise(const Keypoints2D& kps, double ratio,
                                                double sigma_px, std::uint64_t seed,
                                                NoiseModel model = NoiseModel::kFraction);

inline constexpr int kDefaultSsimWindow = 7;
inline constexpr double kSsimThreshold = 0.5;

/// Mean local SSIM over every fully-contained window x window patch, with a
/// uniform window, population statistics and C1 = 0.01^2, C2 = 0.03^2.
/// Throws DimensionMismatchError on differing sizes and InvalidInputError
/// on an even, too-small or too-large window.
[[nodiscard]] double ssim(const GrayImage& a, const GrayImage& b, int window = kDefaultSsimWindow);

/// Images scoring below the threshold are rejected.
[[nodiscard]] inline bool passes_quality_gate(double ssim_score, double threshold = kSsimThreshold) {
  return ssim_score >= threshold;
}

struct OverlayStyle {
  Rgb color = {200, 170, 150};
  /// Optional per-face colors overriding `color`.
  std::vector<Rgb> face_colors;
};

/// Z-buffered flat-shaded splat of projected triangles over `background`.
/// Smaller depth is nearer. Pixels are sampled at integer centers; a pixel
/// is covered when it lies on the inner side of all three edges. Degenerate
/// (collapsed) triangles are skipped. With no faces, vertices are splatted
/// as single pixels.
[[nodiscard]] RgbImage composite_overlay(const RgbImage& background, const RowMajorX2& projected,
                                         std::span<const double> depth, const FaceMatrix& faces,
                                         const OverlayStyle& style = {});

/// Projects a posed mesh into `bbox` and composites it; depth is the Z coordinate.
[[nodiscard]] RgbImage render_overlay(const RgbImage& background, const VertexMatrix& vertices,
                                      const FaceMatrix& faces, const WeakPerspectiveCamera& cam,
                                      const std::array<double, 4>& bbox,
                                      const OverlayStyle& style = {});

}  // namespace ampkin
