#include <fstream>

#include "ampkin/binary_io.h"
#include "ampkin/body_model.h"
#include "ampkin/errors.h"

namespace ampkin {
namespace {

constexpr std::string_view kTemplateMagic = "AMPKIN01";
// Largest vertex count accepted from a file header.
constexpr std::uint32_t kMaxVertices = 1u << 22;

}  // namespace

void write_template(const BodyTemplate& tmpl, std::ostream& out) {
  validate_template(tmpl);
  const auto n = static_cast<std::uint32_t>(tmpl.num_vertices());
  binary::write_magic(out, kTemplateMagic);
  binary::write_u32(out, n);
  binary::write_u32(out, kNumJoints);
  binary::write_u32(out, kNumBetas);
  // All matrices are row-major, so their storage is already the file order.
  binary::write_f64s(out, {tmpl.rest_vertices.data(), static_cast<std::size_t>(tmpl.rest_vertices.size())});
  binary::write_f64s(out, {tmpl.skin_weights.data(), static_cast<std::size_t>(tmpl.skin_weights.size())});
  binary::write_f64s(out, {tmpl.shape_dirs.data(), static_cast<std::size_t>(tmpl.shape_dirs.size())});
  binary::write_f64s(out, {tmpl.joint_regressor.data(), static_cast<std::size_t>(tmpl.joint_regressor.size())});
  for (int p : tmpl.parents) {
    binary::write_i32(out, p);
  }
  for (const auto& name : tmpl.joint_names) {
    binary::write_string(out, name);
  }
  // Optional trailing face block.
  binary::write_u32(out, static_cast<std::uint32_t>(tmpl.faces.rows()));
  for (Eigen::Index i = 0; i < tmpl.faces.size(); ++i) {
    binary::write_i32(out, tmpl.faces.data()[i]);
  }
  if (!out) {
    throw IoError("failed writing template");
  }
}

void save_template(const BodyTemplate& tmpl, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  write_template(tmpl, out);
}

BodyTemplate read_template(std::istream& in) {
  binary::expect_magic(in, kTemplateMagic);
  const std::uint32_t n = binary::read_u32(in, "header N");
  const std::uint32_t joints = binary::read_u32(in, "header J");
  const std::uint32_t betas = binary::read_u32(in, "header K_beta");
  if (joints != kNumJoints) {
    throw SchemaError("header: J must be 24, got " + std::to_string(joints));
  }
  if (betas != kNumBetas) {
    throw SchemaError("header: K_beta must be 10, got " + std::to_string(betas));
  }
  if (n == 0 || n > kMaxVertices) {
    throw SchemaError("header: vertex count out of range: " + std::to_string(n));
  }
  const auto rows = static_cast<Eigen::Index>(n);

  BodyTemplate tmpl;
  tmpl.rest_vertices.resize(rows, 3);
  tmpl.skin_weights.resize(rows, kNumJoints);
  tmpl.shape_dirs.resize(3 * rows, kNumBetas);
  tmpl.joint_regressor.resize(kNumJoints, rows);
  binary::read_f64s(in, {tmpl.rest_vertices.data(), static_cast<std::size_t>(tmpl.rest_vertices.size())}, "rest_vertices");
  binary::read_f64s(in, {tmpl.skin_weights.data(), static_cast<std::size_t>(tmpl.skin_weights.size())}, "skin_weights");
  binary::read_f64s(in, {tmpl.shape_dirs.data(), static_cast<std::size_t>(tmpl.shape_dirs.size())}, "shape_dirs");
  binary::read_f64s(in, {tmpl.joint_regressor.data(), static_cast<std::size_t>(tmpl.joint_regressor.size())}, "joint_regressor");
  for (int& p : tmpl.parents) {
    p = binary::read_i32(in, "parents");
  }
  for (auto& name : tmpl.joint_names) {
    name = binary::read_string(in, "joint names");
  }
  if (!binary::at_end(in)) {
    const std::uint32_t n_faces = binary::read_u32(in, "face count");
    if (n_faces > 4 * kMaxVertices) {
      throw SchemaError("face count out of range: " + std::to_string(n_faces));
    }
    tmpl.faces.resize(static_cast<Eigen::Index>(n_faces), 3);
    for (Eigen::Index i = 0; i < tmpl.faces.size(); ++i) {
      tmpl.faces.data()[i] = binary::read_i32(in, "faces");
    }
  }
  validate_template(tmpl);
  return tmpl;
}

BodyTemplate load_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open template " + path.string());
  }
  return read_template(in);
}

}  // namespace ampkin
