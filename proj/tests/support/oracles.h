#pragma once

// Reference implementations written independently of the library code
// paths they check. Slow and naive on purpose.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "ampkin/body_model.h"
#include "ampkin/image.h"
#include "ampkin/rotations.h"

namespace oracle {

using ampkin::Mat3;
using ampkin::Vec3;

struct Quat {
  double w, x, y, z;
};

inline Quat mul(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

/// Rotation matrix of an axis-angle vector, built by conjugating each basis
/// vector with the unit quaternion.
inline Mat3 axis_angle_matrix(const Vec3& v) {
  const double theta = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  Quat q{1.0, 0.0, 0.0, 0.0};
  if (theta > 0.0) {
    const double s = std::sin(theta / 2.0) / theta;
    q = {std::cos(theta / 2.0), v[0] * s, v[1] * s, v[2] * s};
  }
  const Quat qc{q.w, -q.x, -q.y, -q.z};
  Mat3 m;
  for (int c = 0; c < 3; ++c) {
    Quat e{0.0, c == 0 ? 1.0 : 0.0, c == 1 ? 1.0 : 0.0, c == 2 ? 1.0 : 0.0};
    const Quat r = mul(mul(q, e), qc);
    m(0, c) = r.x;
    m(1, c) = r.y;
    m(2, c) = r.z;
  }
  return m;
}

using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat4 mat4_mul(const Mat4& a, const Mat4& b) {
  Mat4 r{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) {
        s += a[i][k] * b[k][j];
      }
      r[i][j] = s;
    }
  }
  return r;
}

inline Mat4 make_mat4(const Mat3& r, const std::array<double, 3>& t) {
  Mat4 m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      m[i][j] = r(i, j);
    }
    m[i][3] = t[i];
  }
  m[3][3] = 1.0;
  return m;
}

struct Mesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<double, 3>> joints;
};

/// Shape blend by explicit triple loop.
inline std::vector<std::array<double, 3>> shaped(const ampkin::BodyTemplate& t,
                                                 const ampkin::ShapeParams& beta) {
  const int n = static_cast<int>(t.rest_vertices.rows());
  std::vector<std::array<double, 3>> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      double v = t.rest_vertices(i, c);
      for (int k = 0; k < ampkin::kNumBetas; ++k) {
        v += t.shape_dirs(3 * i + c, k) * beta.betas[k];
      }
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = v;
    }
  }
  return out;
}

inline std::vector<std::array<double, 3>> regress(const ampkin::BodyTemplate& t,
                                                  const std::vector<std::array<double, 3>>& v) {
  std::vector<std::array<double, 3>> j(ampkin::kNumJoints, {0.0, 0.0, 0.0});
  for (int r = 0; r < ampkin::kNumJoints; ++r) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (int c = 0; c < 3; ++c) {
        j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] +=
            t.joint_regressor(r, static_cast<Eigen::Index>(i)) * v[i][static_cast<std::size_t>(c)];
      }
    }
  }
  return j;
}

/// Forward pass composing one 4x4 matrix per joint down the parent chain.
inline Mesh forward(const ampkin::BodyTemplate& t, const ampkin::PoseParams& pose,
                    const ampkin::ShapeParams& beta) {
  const auto v = shaped(t, beta);
  const auto jr = regress(t, v);
  std::array<Mat4, ampkin::kNumJoints> world{};
  for (int j = 0; j < ampkin::kNumJoints; ++j) {
    const int p = t.parents[static_cast<std::size_t>(j)];
    std::array<double, 3> offset = jr[static_cast<std::size_t>(j)];
    if (p >= 0) {
      for (int c = 0; c < 3; ++c) {
        offset[static_cast<std::size_t>(c)] -= jr[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)];
      }
    }
    const Mat4 local = make_mat4(pose[j].matrix(), offset);
    world[static_cast<std::size_t>(j)] = p < 0 ? local : mat4_mul(world[static_cast<std::size_t>(p)], local);
  }
  std::array<Mat4, ampkin::kNumJoints> skin{};
  for (int j = 0; j < ampkin::kNumJoints; ++j) {
    const auto& rj = jr[static_cast<std::size_t>(j)];
    skin[static_cast<std::size_t>(j)] =
        mat4_mul(world[static_cast<std::size_t>(j)], make_mat4(Mat3::Identity(), {-rj[0], -rj[1], -rj[2]}));
  }
  Mesh m;
  m.vertices.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int j = 0; j < ampkin::kNumJoints; ++j) {
      const double w = t.skin_weights(static_cast<Eigen::Index>(i), j);
      const Mat4& a = skin[static_cast<std::size_t>(j)];
      for (int r = 0; r < 3; ++r) {
        out[static_cast<std::size_t>(r)] +=
            w * (a[r][0] * v[i][0] + a[r][1] * v[i][1] + a[r][2] * v[i][2] + a[r][3]);
      }
    }
    m.vertices[i] = out;
  }
  m.joints = regress(t, m.vertices);
  return m;
}

/// Exhaustive nearest code, ties to the lowest index.
inline int nearest_code(const Eigen::MatrixXd& codes, const Eigen::RowVectorXd& z) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int m = 0; m < codes.rows(); ++m) {
    double d = 0.0;
    for (int k = 0; k < codes.cols(); ++k) {
      const double e = z[k] - codes(m, k);
      d += e * e;
    }
    if (d < best_d) {
      best_d = d;
      best = m;
    }
  }
  return best;
}

inline Eigen::MatrixXd softmax_decode(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& codes) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(logits.rows(), codes.cols());
  for (int s = 0; s < logits.rows(); ++s) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < logits.cols(); ++m) {
      mx = std::max(mx, logits(s, m));
    }
    std::vector<double> w(static_cast<std::size_t>(logits.cols()));
    double total = 0.0;
    for (int m = 0; m < logits.cols(); ++m) {
      w[static_cast<std::size_t>(m)] = std::exp(logits(s, m) - mx);
      total += w[static_cast<std::size_t>(m)];
    }
    for (int m = 0; m < logits.cols(); ++m) {
      for (int k = 0; k < codes.cols(); ++k) {
        out(s, k) += w[static_cast<std::size_t>(m)] / total * codes(m, k);
      }
    }
  }
  return out;
}

inline Mat3 rot_z(double a) {
  Mat3 r;
  r << std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a), 0.0, 0.0, 0.0, 1.0;
  return r;
}

/// PA error for points lying in the z = 0 plane: searches the proper
/// rotations that keep the plane (Rz(t) and Rz(t)*Rx(pi)) on a grid that is
/// repeatedly narrowed around the best angle; scale and translation are
/// solved in closed form for each candidate.
inline double planar_pa_error(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt,
                              bool with_scale = true) {
  const std::size_t n = pred.size();
  Vec3 mp = Vec3::Zero();
  Vec3 mg = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mp += pred[i];
    mg += gt[i];
  }
  mp /= static_cast<double>(n);
  mg /= static_cast<double>(n);

  auto fit = [&](const Mat3& r, double* mean_err) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 a = r * (pred[i] - mp);
      num += a.dot(gt[i] - mg);
      den += a.squaredNorm();
    }
    const double s = with_scale ? num / den : 1.0;
    double sse = 0.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 e = s * (r * (pred[i] - mp)) - (gt[i] - mg);
      sse += e.squaredNorm();
      mean += e.norm();
    }
    if (mean_err != nullptr) {
      *mean_err = mean / static_cast<double>(n);
    }
    return sse;
  };

  Mat3 flip = Mat3::Identity();
  flip(1, 1) = -1.0;
  flip(2, 2) = -1.0;
  double best_fit = std::numeric_limits<double>::infinity();
  double best_err = 0.0;
  for (const Mat3& base : {Mat3(Mat3::Identity()), flip}) {
    double lo = -std::numbers::pi;
    double hi = std::numbers::pi;
    double best_angle = 0.0;
    for (int level = 0; level < 12; ++level) {
      const int steps = level == 0 ? 3600 : 200;
      double best_sse = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= steps; ++k) {
        const double a = lo + (hi - lo) * k / steps;
        const double sse = fit(rot_z(a) * base, nullptr);
        if (sse < best_sse) {
          best_sse = sse;
          best_angle = a;
        }
      }
      const double step = (hi - lo) / steps;
      lo = best_angle - 2.0 * step;
      hi = best_angle + 2.0 * step;
    }
    double err = 0.0;
    const double sse = fit(rot_z(best_angle) * base, &err);
    if (sse < best_fit) {
      best_fit = sse;
      best_err = err;
    }
  }
  return best_err;
}

/// Edge-function test at integer pixel centres; the sign convention of the
/// triangle does not matter. Returns +1 inside with margin, -1 outside with
/// margin, 0 for pixels too close to an edge to call.
inline int classify_pixel(const std::array<double, 2>& a, const std::array<double, 2>& b,
                          const std::array<double, 2>& c, double x, double y, double margin) {
  auto edge = [&](const std::array<double, 2>& p, const std::array<double, 2>& q) {
    const double dx = q[0] - p[0];
    const double dy = q[1] - p[1];
    return ((x - p[0]) * dy - (y - p[1]) * dx) / std::hypot(dx, dy);
  };
  const double e0 = edge(a, b);
  const double e1 = edge(b, c);
  const double e2 = edge(c, a);
  const bool pos = e0 > margin && e1 > margin && e2 > margin;
  const bool neg = e0 < -margin && e1 < -margin && e2 < -margin;
  if (pos || neg) {
    return 1;
  }
  if (e0 < -margin || e1 < -margin || e2 < -margin) {
    if (e0 > margin || e1 > margin || e2 > margin) {
      return -1;
    }
  }
  return 0;
}

/// SSIM of two constant images: the structure and contrast terms are 1, so
/// only the luminance term remains.
inline double constant_ssim(double a, double b) {
  constexpr double c1 = 0.01 * 0.01;
  return (2.0 * a * b + c1) / (a * a + b * b + c1);
}

/// Level of a constant image whose SSIM against a constant image at `a`
/// equals `target` (the larger root of the luminance term).
inline double constant_level_for_ssim(double a, double target) {
  constexpr double c1 = 0.01 * 0.01;
  // target*(b^2) - 2ab + target*a^2 + (target - 1)*c1 = 0
  const double qa = target;
  const double qb = -2.0 * a;
  const double qc = target * a * a + (target - 1.0) * c1;
  const double disc = qb * qb - 4.0 * qa * qc;
  return (-qb + std::sqrt(disc)) / (2.0 * qa);
}

}  // namespace oracle
