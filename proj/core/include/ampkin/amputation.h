#pragma once

#include <array>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ampkin/body_model.h"
#include "ampkin/skeleton.h"

namespace ampkin {

enum class Limb : int { kLeftArm = 0, kRightArm = 1, kLeftLeg = 2, kRightLeg = 3 };

inline constexpr int kNumLimbs = 4;
inline constexpr int kNumLevels = 4;  // 0 = intact, 1..3 = increasingly proximal
inline constexpr int kNumAmputationIndices = 12;
inline constexpr std::array<Limb, kNumLimbs> kAllLimbs = {Limb::kLeftArm, Limb::kRightArm,
                                                          Limb::kLeftLeg, Limb::kRightLeg};

[[nodiscard]] std::string_view limb_token(Limb limb);

/// One limb's classification: level 0 intact; arms 1/2/3 = hand/forearm/full arm,
/// legs 1/2/3 = ankle/knee/full leg.
struct LimbClass {
  Limb limb = Limb::kLeftArm;
  int level = 0;

  /// Throws InvalidInputError when level is outside 0..3.
  static LimbClass make(Limb limb, int level);
  friend bool operator==(const LimbClass&, const LimbClass&) = default;
};

/// Per-limb classes in (L_arm, R_arm, L_leg, R_leg) order. The binary
/// vector is derived, so it always agrees with the classes.
class AmputationLabel {
 public:
  AmputationLabel() = default;
  /// Throws InvalidInputError on a level outside 0..3.
  explicit AmputationLabel(const std::array<int, kNumLimbs>& levels);

  static AmputationLabel none() { return {}; }
  static AmputationLabel single(const LimbClass& c);

  [[nodiscard]] LimbClass limb(Limb l) const {
    return {l, levels_[static_cast<std::size_t>(l)]};
  }
  [[nodiscard]] const std::array<int, kNumLimbs>& levels() const { return levels_; }
  /// y_hat: 1 where the limb is amputated.
  [[nodiscard]] std::array<int, kNumLimbs> binary() const;
  [[nodiscard]] bool any() const;

  void set(const LimbClass& c);

  friend bool operator==(const AmputationLabel&, const AmputationLabel&) = default;

 private:
  std::array<int, kNumLimbs> levels_{};
};

/// Index-select entry in 0..11: idx = 3 * limb_ordinal + (level - 1).
class AmputationIndex {
 public:
  /// Throws InvalidInputError outside [0, 11].
  explicit AmputationIndex(int idx);
  [[nodiscard]] int value() const { return idx_; }
  friend bool operator==(const AmputationIndex&, const AmputationIndex&) = default;

 private:
  int idx_;
};

using LimbLogits = Eigen::Vector4d;

/// The amputated parent joint of a limb class plus all its descendants,
/// ascending. Empty for level 0.
[[nodiscard]] std::vector<int> limb_class_to_joints(const LimbClass& c);

/// Union of limb_class_to_joints over the label's four limbs.
[[nodiscard]] std::set<int> amputated_joints(const AmputationLabel& label);

[[nodiscard]] LimbClass index_to_label(AmputationIndex idx);
/// Inverse of index_to_label. Throws InvalidInputError for level 0.
[[nodiscard]] AmputationIndex label_to_index(const LimbClass& c);

/// 0 iff argmax(h) == 0; ties resolve to the lowest index.
[[nodiscard]] int binary_decision(const LimbLogits& h);
[[nodiscard]] std::array<int, kNumLimbs> binary_decisions(
    const std::array<LimbLogits, kNumLimbs>& heads);

/// Copy of `pose` with every amputated joint set to the zero matrix.
[[nodiscard]] PoseParams apply_mask(const PoseParams& pose, const AmputationLabel& label);

/// J x (x, y, conf) pixel keypoints.
using Keypoints2D = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Zeroes (x, y, conf) for amputated-subtree joints and for `occluded`.
[[nodiscard]] Keypoints2D mask_keypoints_2d(const Keypoints2D& kps, const AmputationLabel& label,
                                            const std::set<int>& occluded = {});

/// "Larm:i,Rarm:i,Lleg:i,Rleg:i".
[[nodiscard]] std::string format_label(const AmputationLabel& label);
/// Accepts any subset of the four limb tokens in any order; missing limbs
/// are intact. Throws InvalidInputError on malformed text or duplicates.
[[nodiscard]] AmputationLabel parse_label(std::string_view text);

}  // namespace ampkin
