#include "ampkin/amputation.h"

#include <charconv>

#include "ampkin/errors.h"

namespace ampkin {
namespace {

// Amputated parent joint per limb and level 1..3.
constexpr std::array<std::array<int, 3>, kNumLimbs> kLevelRoots = {{
    {kLeftWrist, kLeftElbow, kLeftShoulder},
    {kRightWrist, kRightElbow, kRightShoulder},
    {kLeftAnkle, kLeftKnee, kLeftHip},
    {kRightAnkle, kRightKnee, kRightHip},
}};

constexpr std::array<std::string_view, kNumLimbs> kLimbTokens = {"Larm", "Rarm", "Lleg", "Rleg"};

void check_level(int level) {
  if (level < 0 || level >= kNumLevels) {
    throw InvalidInputError("amputation level must be in 0..3, got " + std::to_string(level));
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view limb_token(Limb limb) { return kLimbTokens[static_cast<std::size_t>(limb)]; }

LimbClass LimbClass::make(Limb limb, int level) {
  check_level(level);
  return {limb, level};
}

AmputationLabel::AmputationLabel(const std::array<int, kNumLimbs>& levels) : levels_(levels) {
  for (int l : levels_) {
    check_level(l);
  }
}

AmputationLabel AmputationLabel::single(const LimbClass& c) {
  AmputationLabel label;
  label.set(c);
  return label;
}

void AmputationLabel::set(const LimbClass& c) {
  check_level(c.level);
  levels_[static_cast<std::size_t>(c.limb)] = c.level;
}

std::array<int, kNumLimbs> AmputationLabel::binary() const {
  std::array<int, kNumLimbs> out{};
  for (std::size_t p = 0; p < kNumLimbs; ++p) {
    out[p] = levels_[p] > 0 ? 1 : 0;
  }
  return out;
}

bool AmputationLabel::any() const {
  for (int l : levels_) {
    if (l > 0) return true;
  }
  return false;
}

AmputationIndex::AmputationIndex(int idx) : idx_(idx) {
  if (idx < 0 || idx >= kNumAmputationIndices) {
    throw InvalidInputError("amputation index must be in 0..11, got " + std::to_string(idx));
  }
}

std::vector<int> limb_class_to_joints(const LimbClass& c) {
  check_level(c.level);
  if (c.level == 0) {
    return {};
  }
  const int root =
      kLevelRoots[static_cast<std::size_t>(c.limb)][static_cast<std::size_t>(c.level - 1)];
  return subtree(kSmplParents, root);
}

std::set<int> amputated_joints(const AmputationLabel& label) {
  std::set<int> out;
  for (Limb l : kAllLimbs) {
    for (int j : limb_class_to_joints(label.limb(l))) {
      out.insert(j);
    }
  }
  return out;
}

LimbClass index_to_label(AmputationIndex idx) {
  return {kAllLimbs[static_cast<std::size_t>(idx.value() / 3)], idx.value() % 3 + 1};
}

AmputationIndex label_to_index(const LimbClass& c) {
  check_level(c.level);
  if (c.level == 0) {
    throw InvalidInputError("intact limb has no amputation index");
  }
  return AmputationIndex(3 * static_cast<int>(c.limb) + (c.level - 1));
}

int binary_decision(const LimbLogits& h) {
  if (!h.allFinite()) {
    throw InvalidInputError("limb logits must be finite");
  }
  int best = 0;
  for (int k = 1; k < h.size(); ++k) {
    if (h[k] > h[best]) {
      best = k;
    }
  }
  return best == 0 ? 0 : 1;
}

std::array<int, kNumLimbs> binary_decisions(const std::array<LimbLogits, kNumLimbs>& heads) {
  std::array<int, kNumLimbs> out{};
  for (std::size_t p = 0; p < kNumLimbs; ++p) {
    out[p] = binary_decision(heads[p]);
  }
  return out;
}

PoseParams apply_mask(const PoseParams& pose, const AmputationLabel& label) {
  PoseParams out = pose;
  for (int j : amputated_joints(label)) {
    out[j] = RotationMatrix::zero();
  }
  return out;
}

Keypoints2D mask_keypoints_2d(const Keypoints2D& kps, const AmputationLabel& label,
                              const std::set<int>& occluded) {
  if (!kps.allFinite()) {
    throw InvalidInputError("keypoints must be finite");
  }
  Keypoints2D out = kps;
  auto zero = [&](int j) {
    if (j >= 0 && j < out.rows()) {
      out.row(j).setZero();
    }
  };
  for (int j : amputated_joints(label)) zero(j);
  for (int j : occluded) zero(j);
  return out;
}

std::string format_label(const AmputationLabel& label) {
  std::string out;
  for (std::size_t p = 0; p < kNumLimbs; ++p) {
    if (p > 0) out += ',';
    out += kLimbTokens[p];
    out += ':';
    out += std::to_string(label.levels()[p]);
  }
  return out;
}

AmputationLabel parse_label(std::string_view text) {
  std::array<int, kNumLimbs> levels{};
  std::array<bool, kNumLimbs> seen{};
  text = trim(text);
  if (text.empty()) {
    throw InvalidInputError("empty amputation label");
  }
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw InvalidInputError("malformed amputation label item \"" + std::string(item) + "\"");
    }
    const std::string_view name = trim(item.substr(0, colon));
    const std::string_view value = trim(item.substr(colon + 1));
    std::size_t limb = kNumLimbs;
    for (std::size_t p = 0; p < kNumLimbs; ++p) {
      if (name == kLimbTokens[p]) limb = p;
    }
    if (limb == kNumLimbs) {
      throw InvalidInputError("unknown limb \"" + std::string(name) + "\" in amputation label");
    }
    if (seen[limb]) {
      throw InvalidInputError("limb \"" + std::string(name) + "\" repeated in amputation label");
    }
    seen[limb] = true;
    int level = -1;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), level);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
      throw InvalidInputError("bad level \"" + std::string(value) + "\" in amputation label");
    }
    check_level(level);
    levels[limb] = level;
  }
  return AmputationLabel(levels);
}

}  // namespace ampkin
