#include "ampkin/synth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ampkin/binary_io.h"
#include "ampkin/errors.h"
#include "ampkin/random.h"

namespace ampkin {
namespace {

constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;
constexpr std::string_view kHeatmapMagic = "AMPHM01";

double edge(const Eigen::RowVector2d& a, const Eigen::RowVector2d& b, double px, double py) {
  return (b.x() - a.x()) * (py - a.y()) - (b.y() - a.y()) * (px - a.x());
}

}  // namespace

void WeakPerspectiveCamera::validate() const {
  if (!std::isfinite(s) || !std::isfinite(tx) || !std::isfinite(ty)) {
    throw InvalidInputError("camera parameters must be finite");
  }
  if (!(s > 0.0)) {
    throw InvalidInputError("weak-perspective scale must be positive");
  }
}

RowMajorX2 project_weak_perspective(const RowMajorX3& points, const WeakPerspectiveCamera& cam,
                                    ImageSize size) {
  return project_to_bbox(points, cam,
                         {0.0, 0.0, static_cast<double>(size.width), static_cast<double>(size.height)});
}

RowMajorX2 project_to_bbox(const RowMajorX3& points, const WeakPerspectiveCamera& cam,
                           const std::array<double, 4>& bbox) {
  cam.validate();
  RowMajorX2 out(points.rows(), 2);
  for (Eigen::Index k = 0; k < points.rows(); ++k) {
    const double u = cam.s * (points(k, 0) + cam.tx);
    const double v = cam.s * (points(k, 1) + cam.ty);
    out(k, 0) = bbox[0] + (u + 1.0) / 2.0 * bbox[2];
    out(k, 1) = bbox[1] + (v + 1.0) / 2.0 * bbox[3];
  }
  return out;
}

double HeatmapStack::channel_max(int j) const {
  double best = 0.0;
  for (std::size_t i = static_cast<std::size_t>(j); i < values.size(); i += static_cast<std::size_t>(joints)) {
    best = std::max(best, values[i]);
  }
  return best;
}

double HeatmapStack::channel_sum(int j) const {
  double total = 0.0;
  for (std::size_t i = static_cast<std::size_t>(j); i < values.size(); i += static_cast<std::size_t>(joints)) {
    total += values[i];
  }
  return total;
}

HeatmapStack rasterize_heatmaps(const Keypoints2D& kps, ImageSize size, double sigma) {
  if (!(sigma > 0.0)) {
    throw InvalidInputError("heatmap sigma must be positive");
  }
  if (size.width < 1 || size.height < 1) {
    throw InvalidInputError("heatmap size must be positive");
  }
  HeatmapStack hm;
  hm.height = size.height;
  hm.width = size.width;
  hm.joints = static_cast<int>(kps.rows());
  hm.sigma = sigma;
  hm.values.assign(static_cast<std::size_t>(hm.height) * static_cast<std::size_t>(hm.width) *
                       static_cast<std::size_t>(hm.joints),
                   0.0);
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  for (int j = 0; j < hm.joints; ++j) {
    if (!(kps(j, 2) > 0.0)) {
      continue;
    }
    const double kx = kps(j, 0);
    const double ky = kps(j, 1);
    for (int y = 0; y < hm.height; ++y) {
      const double dy2 = (y - ky) * (y - ky);
      for (int x = 0; x < hm.width; ++x) {
        const double dx2 = (x - kx) * (x - kx);
        hm.values[(static_cast<std::size_t>(y) * static_cast<std::size_t>(hm.width) + static_cast<std::size_t>(x)) *
                      static_cast<std::size_t>(hm.joints) +
                  static_cast<std::size_t>(j)] = std::exp(-(dx2 + dy2) * inv_two_var);
      }
    }
  }
  return hm;
}

void write_heatmaps(const HeatmapStack& hm, std::ostream& out) {
  binary::write_magic(out, kHeatmapMagic);
  binary::write_u32(out, static_cast<std::uint32_t>(hm.height));
  binary::write_u32(out, static_cast<std::uint32_t>(hm.width));
  binary::write_u32(out, static_cast<std::uint32_t>(hm.joints));
  binary::write_f64(out, hm.sigma);
  binary::write_f64s(out, hm.values);
  if (!out) {
    throw IoError("failed writing heatmaps");
  }
}

HeatmapStack read_heatmaps(std::istream& in) {
  binary::expect_magic(in, kHeatmapMagic);
  HeatmapStack hm;
  const std::uint32_t h = binary::read_u32(in, "header H");
  const std::uint32_t w = binary::read_u32(in, "header W");
  const std::uint32_t j = binary::read_u32(in, "header J");
  if (static_cast<std::uint64_t>(h) * w * j > (1ull << 28)) {
    throw SchemaError("heatmap header: tensor too large");
  }
  hm.height = static_cast<int>(h);
  hm.width = static_cast<int>(w);
  hm.joints = static_cast<int>(j);
  hm.sigma = binary::read_f64(in, "header sigma");
  hm.values.resize(static_cast<std::size_t>(h) * w * j);
  binary::read_f64s(in, hm.values, "heatmap values");
  return hm;
}

double default_noise_sigma(const std::array<double, 4>& bbox) {
  return 0.05 * std::hypot(bbox[2], bbox[3]);
}

Keypoints2D inject_keypoint_noise(const Keypoints2D& kps, double ratio, double sigma_px,
                                  std::uint64_t seed, NoiseModel model) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw InvalidInputError("noise ratio must be in [0, 1]");
  }
  if (!(sigma_px >= 0.0) || !std::isfinite(sigma_px)) {
    throw InvalidInputError("noise sigma must be finite and non-negative");
  }
  std::vector<int> visible;
  for (Eigen::Index j = 0; j < kps.rows(); ++j) {
    if (kps(j, 2) > 0.0) {
      visible.push_back(static_cast<int>(j));
    }
  }
  Rng rng(seed);
  Keypoints2D out = kps;
  double sigma = sigma_px;
  std::size_t count = visible.size();
  if (model == NoiseModel::kFraction) {
    // Partial Fisher-Yates: the first `count` entries are a uniform subset.
    count = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(visible.size())));
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t pick = i + static_cast<std::size_t>(rng.below(visible.size() - i));
      std::swap(visible[i], visible[pick]);
    }
    std::sort(visible.begin(), visible.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    sigma = ratio * sigma_px;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const int j = visible[i];
    out(j, 0) += sigma * rng.normal();
    out(j, 1) += sigma * rng.normal();
  }
  return out;
}

double ssim(const GrayImage& a, const GrayImage& b, int window) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionMismatchError("SSIM inputs differ in size");
  }
  if (window < 3 || window % 2 == 0) {
    throw InvalidInputError("SSIM window must be odd and >= 3");
  }
  if (window > a.width() || window > a.height()) {
    throw InvalidInputError("SSIM window larger than the image");
  }
  const double n = static_cast<double>(window) * window;
  double total = 0.0;
  long count = 0;
  for (int y0 = 0; y0 + window <= a.height(); ++y0) {
    for (int x0 = 0; x0 + window <= a.width(); ++x0) {
      double sa = 0.0, sb = 0.0;
      for (int y = y0; y < y0 + window; ++y) {
        for (int x = x0; x < x0 + window; ++x) {
          sa += a.at(x, y);
          sb += b.at(x, y);
        }
      }
      const double mu_a = sa / n;
      const double mu_b = sb / n;
      double var_a = 0.0, var_b = 0.0, cov = 0.0;
      for (int y = y0; y < y0 + window; ++y) {
        for (int x = x0; x < x0 + window; ++x) {
          const double da = a.at(x, y) - mu_a;
          const double db = b.at(x, y) - mu_b;
          var_a += da * da;
          var_b += db * db;
          cov += da * db;
        }
      }
      var_a /= n;
      var_b /= n;
      cov /= n;
      total += ((2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2)) /
               ((mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

RgbImage composite_overlay(const RgbImage& background, const RowMajorX2& projected,
                           std::span<const double> depth, const FaceMatrix& faces,
                           const OverlayStyle& style) {
  if (depth.size() != static_cast<std::size_t>(projected.rows())) {
    throw DimensionMismatchError("one depth value per projected vertex required");
  }
  if (!style.face_colors.empty() && style.face_colors.size() != static_cast<std::size_t>(faces.rows())) {
    throw DimensionMismatchError("face color count differs from face count");
  }
  RgbImage out = background;
  const int width = out.width();
  const int height = out.height();
  std::vector<double> zbuf(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                           std::numeric_limits<double>::infinity());
  auto try_write = [&](int x, int y, double z, Rgb color) {
    double& slot = zbuf[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    if (z < slot) {
      slot = z;
      out.set(x, y, color);
    }
  };

  if (faces.rows() == 0) {
    for (Eigen::Index v = 0; v < projected.rows(); ++v) {
      const double px = projected(v, 0);
      const double py = projected(v, 1);
      if (!std::isfinite(px) || !std::isfinite(py) || !std::isfinite(depth[static_cast<std::size_t>(v)])) {
        continue;
      }
      const long x = std::lround(px);
      const long y = std::lround(py);
      if (x >= 0 && x < width && y >= 0 && y < height) {
        try_write(static_cast<int>(x), static_cast<int>(y), depth[static_cast<std::size_t>(v)], style.color);
      }
    }
    return out;
  }

  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    const int i0 = faces(f, 0), i1 = faces(f, 1), i2 = faces(f, 2);
    if (std::min({i0, i1, i2}) < 0 || std::max({i0, i1, i2}) >= projected.rows()) {
      throw InvalidInputError("face references a missing vertex");
    }
    const Eigen::RowVector2d p0 = projected.row(i0);
    const Eigen::RowVector2d p1 = projected.row(i1);
    const Eigen::RowVector2d p2 = projected.row(i2);
    const double z0 = depth[static_cast<std::size_t>(i0)];
    const double z1 = depth[static_cast<std::size_t>(i1)];
    const double z2 = depth[static_cast<std::size_t>(i2)];
    if (!p0.allFinite() || !p1.allFinite() || !p2.allFinite() || !std::isfinite(z0 + z1 + z2)) {
      continue;
    }
    const double area = edge(p0, p1, p2.x(), p2.y());
    if (std::abs(area) < 1e-12) {
      continue;
    }
    const int x_lo = std::max(0, static_cast<int>(std::ceil(std::min({p0.x(), p1.x(), p2.x()}))));
    const int x_hi = std::min(width - 1, static_cast<int>(std::floor(std::max({p0.x(), p1.x(), p2.x()}))));
    const int y_lo = std::max(0, static_cast<int>(std::ceil(std::min({p0.y(), p1.y(), p2.y()}))));
    const int y_hi = std::min(height - 1, static_cast<int>(std::floor(std::max({p0.y(), p1.y(), p2.y()}))));
    const Rgb color = style.face_colors.empty() ? style.color : style.face_colors[static_cast<std::size_t>(f)];
    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        // Normalized barycentrics are non-negative inside for either winding.
        const double w0 = edge(p1, p2, x, y) / area;
        const double w1 = edge(p2, p0, x, y) / area;
        const double w2 = edge(p0, p1, x, y) / area;
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) {
          continue;
        }
        try_write(x, y, w0 * z0 + w1 * z1 + w2 * z2, color);
      }
    }
  }
  return out;
}

RgbImage render_overlay(const RgbImage& background, const VertexMatrix& vertices,
                        const FaceMatrix& faces, const WeakPerspectiveCamera& cam,
                        const std::array<double, 4>& bbox, const OverlayStyle& style) {
  const RowMajorX2 projected = project_to_bbox(vertices, cam, bbox);
  std::vector<double> depth(static_cast<std::size_t>(vertices.rows()));
  for (Eigen::Index v = 0; v < vertices.rows(); ++v) {
    depth[static_cast<std::size_t>(v)] = vertices(v, 2);
  }
  return composite_overlay(background, projected, depth, faces, style);
}

}  // namespace ampkin
