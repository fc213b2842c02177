#include "ampkin/annotations.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ampkin/errors.h"

namespace ampkin {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr std::array<std::string_view, 9> kFields = {
    "image", "bbox", "pose_aa", "pose_mask", "betas", "joints3d", "kp2d", "camera", "amputation"};

const json& field(const json& j, std::string_view name) {
  const auto it = j.find(name);
  if (it == j.end()) {
    throw SchemaError("record: missing required field \"" + std::string(name) + "\"");
  }
  return *it;
}

double number(const json& j, std::string_view where) {
  if (!j.is_number()) {
    throw SchemaError("record: " + std::string(where) + " must be a number");
  }
  return j.get<double>();
}

std::vector<double> numbers(const json& j, std::size_t n, std::string_view where) {
  if (!j.is_array() || j.size() != n) {
    throw SchemaError("record: " + std::string(where) + " must be an array of " +
                      std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  out.reserve(n);
  for (const auto& v : j) {
    out.push_back(number(v, where));
  }
  return out;
}

const json& rows_of(const json& j, std::string_view where) {
  if (!j.is_array() || j.size() != kNumJoints) {
    throw SchemaError("record: " + std::string(where) + " must be an array of 24 rows");
  }
  return j;
}

template <typename Row>
ojson row3(const Row& r) {
  return ojson::array({r(0), r(1), r(2)});
}

std::string joint_list(const std::vector<int>& joints) {
  std::string out;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(joints[i]);
  }
  return out;
}

}  // namespace

PoseParams AnnotationRecord::unmasked_pose() const {
  PoseParams pose;
  for (int j = 0; j < kNumJoints; ++j) {
    pose[j] = axis_angle_to_matrix({pose_aa[static_cast<std::size_t>(j)]});
  }
  return pose;
}

PoseParams AnnotationRecord::pose() const {
  PoseParams pose = unmasked_pose();
  for (int j = 0; j < kNumJoints; ++j) {
    if (pose_mask[static_cast<std::size_t>(j)]) {
      pose[j] = RotationMatrix::zero();
    }
  }
  return pose;
}

AnnotationRecord emit_record(const BodyTemplate& tmpl, const PoseParams& pose,
                             const ShapeParams& betas, const AmputationLabel& label,
                             const WeakPerspectiveCamera& camera, const EmitOptions& options) {
  camera.validate();
  const auto masked_joints = amputated_joints(label);
  AnnotationRecord rec;
  rec.image = options.image;
  rec.bbox = options.bbox;
  rec.betas = betas;
  rec.camera = camera;
  rec.label = label;
  for (int j = 0; j < kNumJoints; ++j) {
    const bool masked = masked_joints.count(j) > 0;
    rec.pose_mask[static_cast<std::size_t>(j)] = masked;
    if (pose[j].is_zero()) {
      if (!masked) {
        throw InvalidInputError("pose has a zero matrix at joint " + std::to_string(j) +
                                ", which the amputation label does not cover");
      }
      rec.pose_aa[static_cast<std::size_t>(j)] = Vec3::Zero();
    } else {
      rec.pose_aa[static_cast<std::size_t>(j)] = matrix_to_axis_angle(pose[j]).v;
    }
  }
  // Run the body model on the stored representation so validation reproduces it exactly.
  const MeshResult mesh = forward(tmpl, rec.pose(), betas);
  rec.joints3d = mesh.joints_posed;
  const RowMajorX2 projected = project_to_bbox(rec.joints3d, camera, rec.bbox);
  Keypoints2D kps(kNumJoints, 3);
  kps.leftCols<2>() = projected;
  kps.col(2).setOnes();
  rec.kp2d = mask_keypoints_2d(kps, label, options.occluded);
  return rec;
}

std::vector<Violation> validate_record(const AnnotationRecord& rec, const BodyTemplate* tmpl) {
  std::vector<Violation> out;
  const auto expected_mask = amputated_joints(rec.label);

  bool finite = rec.joints3d.allFinite() && rec.kp2d.allFinite() && rec.betas.betas.allFinite();
  for (const auto& aa : rec.pose_aa) finite = finite && aa.allFinite();
  for (double b : rec.bbox) finite = finite && std::isfinite(b);
  if (!finite) {
    out.push_back({"finite", {}, "record contains non-finite numbers"});
  }
  try {
    rec.camera.validate();
  } catch (const Error& e) {
    out.push_back({"camera", {}, e.what()});
  }
  if (rec.kp2d.rows() != kNumJoints) {
    out.push_back({"kp2d_shape", {}, "kp2d must have 24 rows"});
    return out;
  }

  std::vector<int> mask_mismatch;
  for (int j = 0; j < kNumJoints; ++j) {
    if (rec.pose_mask[static_cast<std::size_t>(j)] != (expected_mask.count(j) > 0)) {
      mask_mismatch.push_back(j);
    }
  }
  if (!mask_mismatch.empty()) {
    out.push_back({"mask_label_agreement", mask_mismatch,
                   "pose_mask disagrees with the amputation label at joints " +
                       joint_list(mask_mismatch)});
  }

  std::vector<int> unmasked_keypoints;
  for (int j : expected_mask) {
    if (rec.kp2d(j, 0) != 0.0 || rec.kp2d(j, 1) != 0.0 || rec.kp2d(j, 2) != 0.0) {
      unmasked_keypoints.push_back(j);
    }
  }
  if (!unmasked_keypoints.empty()) {
    out.push_back({"keypoint_masking", unmasked_keypoints,
                   "amputated joints must have 2D keypoint (0, 0, 0): joints " +
                       joint_list(unmasked_keypoints)});
  }

  if (tmpl != nullptr && finite) {
    // Recompute from the label's subtrees so a bad mask cannot hide a joint mismatch.
    const PoseParams pose = apply_mask(rec.unmasked_pose(), rec.label);
    const MeshResult mesh = forward(*tmpl, pose, rec.betas);
    std::vector<int> off;
    double worst = 0.0;
    for (int j = 0; j < kNumJoints; ++j) {
      const double d = (mesh.joints_posed.row(j) - rec.joints3d.row(j)).norm();
      if (d > kJointConsistencyTolerance) {
        off.push_back(j);
        worst = std::max(worst, d);
      }
    }
    if (!off.empty()) {
      std::ostringstream os;
      os << "joints3d differs from the body model by up to " << worst << " m at joints "
         << joint_list(off);
      out.push_back({"joints3d_consistency", off, os.str()});
    }
  }
  return out;
}

ojson to_json(const AnnotationRecord& rec) {
  ojson j;
  j["image"] = rec.image;
  j["bbox"] = rec.bbox;
  ojson pose = ojson::array();
  for (const auto& aa : rec.pose_aa) pose.push_back(row3(aa));
  j["pose_aa"] = std::move(pose);
  j["pose_mask"] = rec.pose_mask;
  ojson betas = ojson::array();
  for (int k = 0; k < kNumBetas; ++k) betas.push_back(rec.betas.betas[k]);
  j["betas"] = std::move(betas);
  ojson joints = ojson::array();
  for (int r = 0; r < kNumJoints; ++r) joints.push_back(row3(rec.joints3d.row(r)));
  j["joints3d"] = std::move(joints);
  ojson kps = ojson::array();
  for (Eigen::Index r = 0; r < rec.kp2d.rows(); ++r) kps.push_back(row3(rec.kp2d.row(r)));
  j["kp2d"] = std::move(kps);
  j["camera"] = {{"s", rec.camera.s}, {"tx", rec.camera.tx}, {"ty", rec.camera.ty}};
  j["amputation"] = format_label(rec.label);
  return j;
}

AnnotationRecord record_from_json(const json& j, ParseMode mode) {
  if (!j.is_object()) {
    throw SchemaError("record: expected a JSON object");
  }
  if (mode == ParseMode::kStrict) {
    for (const auto& item : j.items()) {
      bool known = false;
      for (auto f : kFields) known = known || item.key() == f;
      if (!known) {
        throw SchemaError("record: unknown field \"" + item.key() + "\" (strict mode)");
      }
    }
  }
  AnnotationRecord rec;
  const json& image = field(j, "image");
  if (!image.is_string()) {
    throw SchemaError("record: image must be a string");
  }
  rec.image = image.get<std::string>();

  const auto bbox = numbers(field(j, "bbox"), 4, "bbox");
  std::copy(bbox.begin(), bbox.end(), rec.bbox.begin());

  const json& pose = rows_of(field(j, "pose_aa"), "pose_aa");
  for (int r = 0; r < kNumJoints; ++r) {
    const auto v = numbers(pose[static_cast<std::size_t>(r)], 3, "pose_aa row");
    rec.pose_aa[static_cast<std::size_t>(r)] = Vec3(v[0], v[1], v[2]);
  }
  const json& mask = rows_of(field(j, "pose_mask"), "pose_mask");
  for (int r = 0; r < kNumJoints; ++r) {
    const json& b = mask[static_cast<std::size_t>(r)];
    if (!b.is_boolean()) {
      throw SchemaError("record: pose_mask entries must be booleans");
    }
    rec.pose_mask[static_cast<std::size_t>(r)] = b.get<bool>();
  }
  const auto betas = numbers(field(j, "betas"), kNumBetas, "betas");
  for (int k = 0; k < kNumBetas; ++k) rec.betas.betas[k] = betas[static_cast<std::size_t>(k)];

  const json& joints = rows_of(field(j, "joints3d"), "joints3d");
  for (int r = 0; r < kNumJoints; ++r) {
    const auto v = numbers(joints[static_cast<std::size_t>(r)], 3, "joints3d row");
    rec.joints3d.row(r) << v[0], v[1], v[2];
  }
  const json& kps = rows_of(field(j, "kp2d"), "kp2d");
  for (int r = 0; r < kNumJoints; ++r) {
    const auto v = numbers(kps[static_cast<std::size_t>(r)], 3, "kp2d row");
    rec.kp2d.row(r) << v[0], v[1], v[2];
  }
  const json& cam = field(j, "camera");
  if (!cam.is_object()) {
    throw SchemaError("record: camera must be an object");
  }
  if (mode == ParseMode::kStrict) {
    for (const auto& item : cam.items()) {
      if (item.key() != "s" && item.key() != "tx" && item.key() != "ty") {
        throw SchemaError("record: unknown camera field \"" + item.key() + "\" (strict mode)");
      }
    }
  }
  rec.camera.s = number(field(cam, "s"), "camera.s");
  rec.camera.tx = number(field(cam, "tx"), "camera.tx");
  rec.camera.ty = number(field(cam, "ty"), "camera.ty");

  const json& amp = field(j, "amputation");
  if (!amp.is_string()) {
    throw SchemaError("record: amputation must be a string");
  }
  try {
    rec.label = parse_label(amp.get<std::string>());
  } catch (const InvalidInputError& e) {
    throw SchemaError(std::string("record: amputation: ") + e.what());
  }
  return rec;
}

ojson violations_to_json(const std::vector<Violation>& violations) {
  ojson out = ojson::array();
  for (const auto& v : violations) {
    out.push_back({{"invariant", v.invariant}, {"joints", v.joints}, {"message", v.message}});
  }
  return out;
}

std::string write_records(const std::vector<AnnotationRecord>& records) {
  ojson arr = ojson::array();
  for (const auto& r : records) arr.push_back(to_json(r));
  return arr.dump(1) + "\n";
}

std::vector<AnnotationRecord> parse_records(std::string_view text, ParseMode mode) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  std::vector<AnnotationRecord> out;
  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      try {
        out.push_back(record_from_json(doc[i], mode));
      } catch (const SchemaError& e) {
        throw SchemaError("record " + std::to_string(i) + ": " + e.what());
      }
    }
  } else {
    out.push_back(record_from_json(doc, mode));
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

void save_records(const std::vector<AnnotationRecord>& records, const std::filesystem::path& path) {
  write_text_file(path, write_records(records));
}

std::vector<AnnotationRecord> load_records(const std::filesystem::path& path, ParseMode mode) {
  return parse_records(read_text_file(path), mode);
}

}  // namespace ampkin
