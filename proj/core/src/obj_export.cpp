#include <array>
#include <charconv>
#include <fstream>

#include "ampkin/body_model.h"
#include "ampkin/errors.h"

namespace ampkin {
namespace {

// Shortest round-trip decimal; locale independent.
void put_double(std::ostream& out, double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.write(buf.data(), res.ptr - buf.data());
}

}  // namespace

void write_obj(const VertexMatrix& vertices, const FaceMatrix& faces, std::ostream& out) {
  for (Eigen::Index v = 0; v < vertices.rows(); ++v) {
    out << 'v';
    for (int c = 0; c < 3; ++c) {
      out << ' ';
      put_double(out, vertices(v, c));
    }
    out << '\n';
  }
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    out << "f " << faces(f, 0) + 1 << ' ' << faces(f, 1) + 1 << ' ' << faces(f, 2) + 1 << '\n';
  }
}

void save_obj(const VertexMatrix& vertices, const FaceMatrix& faces,
              const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  write_obj(vertices, faces, out);
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

}  // namespace ampkin
