#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace ampkin {

inline constexpr int kNumJoints = 24;
inline constexpr int kNumBetas = 10;

/// Joint indices of the 24-joint SMPL body.
enum Joint : int {
  kPelvis = 0,
  kLeftHip = 1,
  kRightHip = 2,
  kSpine1 = 3,
  kLeftKnee = 4,
  kRightKnee = 5,
  kSpine2 = 6,
  kLeftAnkle = 7,
  kRightAnkle = 8,
  kSpine3 = 9,
  kLeftFoot = 10,
  kRightFoot = 11,
  kNeck = 12,
  kLeftCollar = 13,
  kRightCollar = 14,
  kHead = 15,
  kLeftShoulder = 16,
  kRightShoulder = 17,
  kLeftElbow = 18,
  kRightElbow = 19,
  kLeftWrist = 20,
  kRightWrist = 21,
  kLeftHand = 22,
  kRightHand = 23,
};

/// SMPL kinematic tree. -1 marks the root.
inline constexpr std::array<int, kNumJoints> kSmplParents = {
    -1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21};

inline constexpr std::array<std::string_view, kNumJoints> kSmplJointNames = {
    "Pelvis",     "L_Hip",      "R_Hip",      "Spine1",     "L_Knee",      "R_Knee",
    "Spine2",     "L_Ankle",    "R_Ankle",    "Spine3",     "L_Foot",      "R_Foot",
    "Neck",       "L_Collar",   "R_Collar",   "Head",       "L_Shoulder",  "R_Shoulder",
    "L_Elbow",    "R_Elbow",    "L_Wrist",    "R_Wrist",    "L_Hand",      "R_Hand"};

/// `root` and all of its descendants, ascending. Requires parents[j] < j.
[[nodiscard]] std::vector<int> subtree(std::span<const int, kNumJoints> parents, int root);

/// Direct children of `joint`, ascending.
[[nodiscard]] std::vector<int> children(std::span<const int, kNumJoints> parents, int joint);

}  // namespace ampkin
