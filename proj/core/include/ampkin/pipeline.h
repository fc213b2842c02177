#pragma once

#include <cstdint>
#include <string>

#include "ampkin/annotations.h"
#include "ampkin/config.h"
#include "ampkin/random.h"

namespace ampkin {

/// Global orientation flipped upright for the image (y down) plus a small
/// random tilt; every other joint gets a random rotation up to
/// `max_joint_angle` radians.
[[nodiscard]] PoseParams sample_pose(Rng& rng, double max_joint_angle = 0.4);

/// Intact with probability 1/4; otherwise one of the 12 amputation
/// indices, plus a second limb with probability 1/5.
[[nodiscard]] AmputationLabel sample_label(Rng& rng);

/// Camera that keeps an upright toy body inside the frame.
[[nodiscard]] WeakPerspectiveCamera sample_camera(Rng& rng);

[[nodiscard]] ShapeParams sample_shape(Rng& rng, double scale = 1.0);

struct SynthSample {
  AnnotationRecord record;
  /// Rasterized from the (optionally noise-injected) visible keypoints.
  HeatmapStack heatmaps;
  /// Empty unless rendering was requested.
  RgbImage image;
};

/// One synthetic sample: random pose, shape, label and camera from
/// `seed`, annotation via emit_record, keypoint heatmaps and (when
/// `background` is non-null) the mesh composited over it.
[[nodiscard]] SynthSample synthesize_sample(const BodyTemplate& tmpl, const SynthConfig& config,
                                            std::uint64_t seed, const std::string& image_name,
                                            const RgbImage* background = nullptr);

}  // namespace ampkin
