#include "ampkin/pipeline.h"

#include <cmath>
#include <numbers>

namespace ampkin {
namespace {

Vec3 random_direction(Rng& rng) {
  Vec3 v(rng.normal(), rng.normal(), rng.normal());
  while (v.norm() < 1e-12) {
    v = Vec3(rng.normal(), rng.normal(), rng.normal());
  }
  return v.normalized();
}

}  // namespace

PoseParams sample_pose(Rng& rng, double max_joint_angle) {
  PoseParams pose;
  const Mat3 upright = axis_angle_to_matrix({Vec3(std::numbers::pi, 0.0, 0.0)}).matrix();
  const Mat3 tilt = axis_angle_to_matrix({random_direction(rng) * rng.uniform(0.0, 0.3)}).matrix();
  pose[0] = RotationMatrix::from_matrix(upright * tilt, 1e-12);
  for (int j = 1; j < kNumJoints; ++j) {
    pose[j] = axis_angle_to_matrix({random_direction(rng) * rng.uniform(0.0, max_joint_angle)});
  }
  return pose;
}

AmputationLabel sample_label(Rng& rng) {
  AmputationLabel label;
  if (rng.uniform() < 0.25) {
    return label;
  }
  const LimbClass first = index_to_label(AmputationIndex(static_cast<int>(rng.below(kNumAmputationIndices))));
  label.set(first);
  if (rng.uniform() < 0.2) {
    const LimbClass second = index_to_label(AmputationIndex(static_cast<int>(rng.below(kNumAmputationIndices))));
    if (second.limb != first.limb) {
      label.set(second);
    }
  }
  return label;
}

WeakPerspectiveCamera sample_camera(Rng& rng) {
  return {rng.uniform(0.9, 1.05), rng.uniform(-0.05, 0.05), -1.03 + rng.uniform(-0.05, 0.05)};
}

ShapeParams sample_shape(Rng& rng, double scale) {
  ShapeParams shape;
  for (int k = 0; k < kNumBetas; ++k) {
    shape.betas[k] = scale * rng.normal();
  }
  return shape;
}

SynthSample synthesize_sample(const BodyTemplate& tmpl, const SynthConfig& config,
                              std::uint64_t seed, const std::string& image_name,
                              const RgbImage* background) {
  Rng rng(seed);
  const PoseParams pose = sample_pose(rng);
  const ShapeParams shape = sample_shape(rng);
  const AmputationLabel label = sample_label(rng);
  const WeakPerspectiveCamera camera = sample_camera(rng);

  EmitOptions options;
  options.image = image_name;
  options.bbox = {0.0, 0.0, static_cast<double>(config.image.width),
                  static_cast<double>(config.image.height)};
  SynthSample sample;
  sample.record = emit_record(tmpl, pose, shape, label, camera, options);

  Keypoints2D kps = sample.record.kp2d;
  if (config.noise_ratio > 0.0) {
    const double sigma = config.noise_sigma_px.value_or(default_noise_sigma(options.bbox));
    kps = inject_keypoint_noise(kps, config.noise_ratio, sigma, rng.next_u64(), config.noise_model);
  }
  sample.heatmaps = rasterize_heatmaps(kps, config.image, config.heatmap_sigma);

  if (background != nullptr) {
    const MeshResult mesh = forward(tmpl, sample.record.pose(), shape);
    sample.image = render_overlay(*background, mesh.vertices, tmpl.faces, camera, options.bbox);
  }
  return sample;
}

}  // namespace ampkin
