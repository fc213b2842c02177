#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ampkin/amputation.h"
#include "ampkin/body_model.h"
#include "ampkin/synth.h"

namespace ampkin {

/// Joint positions must match the template-bound recomputation within this (meters).
inline constexpr double kJointConsistencyTolerance = 1e-6;

/// One annotated sample. The pose is kept as unmasked axis-angle triples
/// plus one mask bit per joint; pose() rebuilds the zero-masked matrices.
struct AnnotationRecord {
  std::string image;
  std::array<double, 4> bbox = {0.0, 0.0, 256.0, 256.0};
  std::array<Vec3, kNumJoints> pose_aa;
  std::array<bool, kNumJoints> pose_mask{};
  ShapeParams betas;
  JointMatrix joints3d = JointMatrix::Zero();
  Keypoints2D kp2d = Keypoints2D::Zero(kNumJoints, 3);
  WeakPerspectiveCamera camera;
  AmputationLabel label;

  AnnotationRecord() { pose_aa.fill(Vec3::Zero()); }

  /// Rotations with mask bits applied as zero matrices.
  [[nodiscard]] PoseParams pose() const;
  /// Rotations ignoring the mask bits.
  [[nodiscard]] PoseParams unmasked_pose() const;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

struct EmitOptions {
  std::string image;
  std::array<double, 4> bbox = {0.0, 0.0, 256.0, 256.0};
  std::set<int> occluded;
};

/// Masks the pose, runs the body model, regresses joints, projects them
/// into the bbox and masks hidden keypoints. Throws InvalidInputError if
/// `pose` already holds zero matrices outside the label's subtrees.
[[nodiscard]] AnnotationRecord emit_record(const BodyTemplate& tmpl, const PoseParams& pose,
                                           const ShapeParams& betas, const AmputationLabel& label,
                                           const WeakPerspectiveCamera& camera,
                                           const EmitOptions& options = {});

struct Violation {
  std::string invariant;
  std::vector<int> joints;
  std::string message;
};

/// Every broken invariant, or an empty list. The joint-consistency check
/// runs only when a template is supplied.
[[nodiscard]] std::vector<Violation> validate_record(const AnnotationRecord& rec,
                                                     const BodyTemplate* tmpl = nullptr);

enum class ParseMode { kStrict, kLenient };

[[nodiscard]] nlohmann::ordered_json to_json(const AnnotationRecord& rec);
/// Throws SchemaError on missing or mistyped fields, and on unknown fields in strict mode.
[[nodiscard]] AnnotationRecord record_from_json(const nlohmann::json& j,
                                                ParseMode mode = ParseMode::kStrict);

[[nodiscard]] nlohmann::ordered_json violations_to_json(const std::vector<Violation>& v);

/// Text forms. A document is either one record object or an array of them.
[[nodiscard]] std::string write_records(const std::vector<AnnotationRecord>& records);
/// Throws ParseError (with byte offset) on malformed JSON.
[[nodiscard]] std::vector<AnnotationRecord> parse_records(std::string_view text,
                                                          ParseMode mode = ParseMode::kStrict);

void save_records(const std::vector<AnnotationRecord>& records, const std::filesystem::path& path);
[[nodiscard]] std::vector<AnnotationRecord> load_records(const std::filesystem::path& path,
                                                         ParseMode mode = ParseMode::kStrict);

/// Reads a whole file; throws IoError.
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace ampkin
