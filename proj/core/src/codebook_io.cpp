#include <fstream>

#include "ampkin/binary_io.h"
#include "ampkin/errors.h"
#include "ampkin/tokenizer.h"

namespace ampkin {
namespace {

constexpr std::string_view kCodebookMagic = "AMPCB01";
constexpr std::uint32_t kMaxEntries = 1u << 26;

}  // namespace

void write_codebook(const Codebook& cb, std::ostream& out) {
  binary::write_magic(out, kCodebookMagic);
  binary::write_u32(out, static_cast<std::uint32_t>(cb.size()));
  binary::write_u32(out, static_cast<std::uint32_t>(cb.dim()));
  binary::write_u8(out, static_cast<std::uint8_t>(cb.kind()));
  // Eigen defaults to column-major; the file is row-major.
  for (int m = 0; m < cb.size(); ++m) {
    for (int k = 0; k < cb.dim(); ++k) binary::write_f64(out, cb.codes()(m, k));
  }
  for (int m = 0; m < cb.size(); ++m) {
    for (int k = 0; k < cb.dim(); ++k) binary::write_f64(out, cb.ema_sum()(m, k));
  }
  for (int m = 0; m < cb.size(); ++m) binary::write_f64(out, cb.usage()[m]);
  if (!out) {
    throw IoError("failed writing codebook");
  }
}

void save_codebook(const Codebook& cb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  write_codebook(cb, out);
}

Codebook read_codebook(std::istream& in) {
  binary::expect_magic(in, kCodebookMagic);
  const std::uint32_t m = binary::read_u32(in, "header M");
  const std::uint32_t d = binary::read_u32(in, "header d");
  const std::uint8_t kind = binary::read_u8(in, "header kind");
  if (m == 0 || d == 0 || static_cast<std::uint64_t>(m) * d > kMaxEntries) {
    throw SchemaError("codebook header: M and d must be positive and bounded");
  }
  if (kind > 1) {
    throw SchemaError("codebook header: kind must be 0 (non_amp) or 1 (amp)");
  }
  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd codes(rows, cols);
  Eigen::MatrixXd ema_sum(rows, cols);
  Eigen::VectorXd usage(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) codes(r, c) = binary::read_f64(in, "codes");
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) ema_sum(r, c) = binary::read_f64(in, "ema_sum");
  }
  for (Eigen::Index r = 0; r < rows; ++r) usage[r] = binary::read_f64(in, "usage");
  try {
    return Codebook(std::move(codes), std::move(usage), std::move(ema_sum),
                    static_cast<CodebookKind>(kind));
  } catch (const InvalidInputError& e) {
    throw SchemaError(std::string("codebook: ") + e.what());
  }
}

Codebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open codebook " + path.string());
  }
  return read_codebook(in);
}

}  // namespace ampkin
