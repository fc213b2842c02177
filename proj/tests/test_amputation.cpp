#include <set>

#include <gtest/gtest.h>

#include "ampkin/amputation.h"
#include "ampkin/errors.h"
#include "ampkin/skeleton.h"
#include "random_inputs.h"

using namespace ampkin;

namespace {

// Descendant closure by repeated scans of the parent table.
std::set<int> walk(int root) {
  std::set<int> out{root};
  bool grew = true;
  while (grew) {
    grew = false;
    for (int j = 0; j < kNumJoints; ++j) {
      if (!out.contains(j) && out.contains(kSmplParents[static_cast<std::size_t>(j)])) {
        out.insert(j);
        grew = true;
      }
    }
  }
  return out;
}

std::set<int> as_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(LimbClass, SubtreeExamples) {
  EXPECT_EQ(limb_class_to_joints(LimbClass::make(Limb::kRightLeg, 2)), (std::vector<int>{5, 8, 11}));
  EXPECT_TRUE(limb_class_to_joints(LimbClass::make(Limb::kLeftArm, 0)).empty());
  EXPECT_EQ(limb_class_to_joints(LimbClass::make(Limb::kLeftArm, 3)), (std::vector<int>{16, 18, 20, 22}));
  EXPECT_THROW((void)LimbClass::make(Limb::kLeftArm, 4), InvalidInputError);
  EXPECT_THROW((void)LimbClass::make(Limb::kLeftArm, -1), InvalidInputError);
}

TEST(LimbClass, SetsAreDescendantClosed) {
  const std::array<std::array<int, 3>, 4> roots = {{{20, 18, 16}, {21, 19, 17}, {7, 4, 1}, {8, 5, 2}}};
  for (int l = 0; l < kNumLimbs; ++l) {
    for (int level = 1; level <= 3; ++level) {
      const auto joints = as_set(limb_class_to_joints(LimbClass::make(static_cast<Limb>(l), level)));
      EXPECT_EQ(joints, walk(roots[static_cast<std::size_t>(l)][static_cast<std::size_t>(level - 1)]));
      for (int j : joints) {
        for (int c = 0; c < kNumJoints; ++c) {
          if (kSmplParents[static_cast<std::size_t>(c)] == j) {
            EXPECT_TRUE(joints.contains(c));
          }
        }
      }
    }
  }
}

TEST(AmputationIndex, Bijection) {
  EXPECT_EQ(index_to_label(AmputationIndex(0)), LimbClass::make(Limb::kLeftArm, 1));
  EXPECT_EQ(index_to_label(AmputationIndex(11)), LimbClass::make(Limb::kRightLeg, 3));
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < kNumAmputationIndices; ++i) {
    const LimbClass c = index_to_label(AmputationIndex(i));
    EXPECT_GE(c.level, 1);
    EXPECT_EQ(label_to_index(c).value(), i);
    seen.insert({static_cast<int>(c.limb), c.level});
  }
  EXPECT_EQ(seen.size(), 12U);
  EXPECT_THROW((void)AmputationIndex(12), InvalidInputError);
  EXPECT_THROW((void)label_to_index(LimbClass::make(Limb::kLeftLeg, 0)), InvalidInputError);
}

TEST(BinaryDecision, Examples) {
  EXPECT_EQ(binary_decision(LimbLogits(2.0, 0.1, 0.1, 0.1)), 0);
  EXPECT_EQ(binary_decision(LimbLogits(0.1, 2.0, 0.1, 0.1)), 1);
  EXPECT_EQ(binary_decision(LimbLogits(1.0, 1.0, 0.5, 0.5)), 0);
  EXPECT_EQ(binary_decision(LimbLogits(0.0, 3.0, 3.0, 3.0)), 1);
  EXPECT_THROW((void)binary_decision(LimbLogits(std::nan(""), 0, 0, 0)), InvalidInputError);
}

TEST(BinaryDecision, OneHotAgreesWithLabel) {
  for (int l = 0; l < kNumLimbs; ++l) {
    for (int level = 0; level < kNumLevels; ++level) {
      AmputationLabel label;
      label.set(LimbClass::make(static_cast<Limb>(l), level));
      LimbLogits h = LimbLogits::Zero();
      h[level] = 1.0;
      EXPECT_EQ(binary_decision(h), label.binary()[static_cast<std::size_t>(l)]);
    }
  }
}

TEST(ApplyMask, Examples) {
  Rng rng(1);
  const PoseParams pose = testing_support::random_pose(rng);
  EXPECT_EQ(apply_mask(pose, AmputationLabel::none()), pose);

  const AmputationLabel rleg2 = AmputationLabel::single(LimbClass::make(Limb::kRightLeg, 2));
  const PoseParams masked = apply_mask(PoseParams::identity(), rleg2);
  for (int j = 0; j < kNumJoints; ++j) {
    if (j == 5 || j == 8 || j == 11) {
      EXPECT_TRUE(masked[j].is_zero());
    } else {
      EXPECT_EQ(masked[j], RotationMatrix::identity());
    }
  }
}

TEST(ApplyMask, IdempotentAndLocal) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const PoseParams pose = testing_support::random_pose(rng);
    AmputationLabel label;
    for (int l = 0; l < kNumLimbs; ++l) {
      label.set(LimbClass::make(static_cast<Limb>(l), static_cast<int>(rng.below(4))));
    }
    const PoseParams once = apply_mask(pose, label);
    EXPECT_EQ(apply_mask(once, label), once);
    const std::set<int> masked = amputated_joints(label);
    for (int j = 0; j < kNumJoints; ++j) {
      if (masked.contains(j)) {
        EXPECT_TRUE(once[j].is_zero());
      } else {
        EXPECT_EQ(once[j], pose[j]);
      }
    }
  }
}

TEST(MaskKeypoints, Rules) {
  Keypoints2D kps(kNumJoints, 3);
  for (int j = 0; j < kNumJoints; ++j) {
    kps.row(j) << 10.0 + j, 20.0 + j, 1.0;
  }
  EXPECT_EQ(mask_keypoints_2d(kps, AmputationLabel::none()), kps);

  const Keypoints2D m = mask_keypoints_2d(kps, AmputationLabel::single(LimbClass::make(Limb::kRightLeg, 2)));
  for (int j = 0; j < kNumJoints; ++j) {
    if (j == 5 || j == 8 || j == 11) {
      EXPECT_EQ(m.row(j), Eigen::RowVector3d::Zero());
    } else {
      EXPECT_EQ(m.row(j), kps.row(j));
    }
  }

  const Keypoints2D occ = mask_keypoints_2d(kps, AmputationLabel::none(), {15});
  EXPECT_EQ(occ.row(15), Eigen::RowVector3d::Zero());
  EXPECT_EQ(occ.row(14), kps.row(14));
}

TEST(LabelText, FormatAndParse) {
  AmputationLabel label;
  label.set(LimbClass::make(Limb::kRightLeg, 2));
  EXPECT_EQ(format_label(label), "Larm:0,Rarm:0,Lleg:0,Rleg:2");
  EXPECT_EQ(parse_label("Larm:0,Rarm:0,Lleg:0,Rleg:2"), label);
  EXPECT_EQ(parse_label("Rleg:2"), label);
  EXPECT_THROW((void)parse_label(""), InvalidInputError);
  EXPECT_THROW((void)parse_label("Rleg:4"), InvalidInputError);
  EXPECT_THROW((void)parse_label("Tail:1"), InvalidInputError);
  EXPECT_THROW((void)parse_label("Rleg:1,Rleg:2"), InvalidInputError);
  EXPECT_THROW((void)parse_label("Rleg2"), InvalidInputError);
  for (int i = 0; i < kNumAmputationIndices; ++i) {
    const AmputationLabel l = AmputationLabel::single(index_to_label(AmputationIndex(i)));
    EXPECT_EQ(parse_label(format_label(l)), l);
  }
}
