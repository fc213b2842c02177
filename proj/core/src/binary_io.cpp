#include "ampkin/binary_io.h"

#include <array>
#include <bit>
#include <string>

#include "ampkin/errors.h"

namespace ampkin::binary {
namespace {

template <std::size_t N>
void put_le(std::ostream& out, std::uint64_t v) {
  std::array<char, N> bytes{};
  for (std::size_t i = 0; i < N; ++i) {
    bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  }
  out.write(bytes.data(), N);
}

template <std::size_t N>
std::uint64_t get_le(std::istream& in, std::string_view what) {
  std::array<unsigned char, N> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), N);
  if (in.gcount() != static_cast<std::streamsize>(N)) {
    throw SchemaError("truncated file while reading " + std::string(what));
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < N; ++i) {
    v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  }
  return v;
}

}  // namespace

void write_magic(std::ostream& out, std::string_view magic) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

void write_u8(std::ostream& out, std::uint8_t v) { put_le<1>(out, v); }
void write_u32(std::ostream& out, std::uint32_t v) { put_le<4>(out, v); }
void write_i32(std::ostream& out, std::int32_t v) {
  put_le<4>(out, static_cast<std::uint32_t>(v));
}
void write_f64(std::ostream& out, double v) { put_le<8>(out, std::bit_cast<std::uint64_t>(v)); }

void write_f64s(std::ostream& out, std::span<const double> values) {
  for (double v : values) {
    write_f64(out, v);
  }
}

void write_string(std::ostream& out, std::string_view s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void expect_magic(std::istream& in, std::string_view magic) {
  std::string got(magic.size(), '\0');
  in.read(got.data(), static_cast<std::streamsize>(magic.size()));
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) || got != magic) {
    throw SchemaError("bad magic: expected \"" + std::string(magic) + "\"");
  }
}

std::uint8_t read_u8(std::istream& in, std::string_view what) {
  return static_cast<std::uint8_t>(get_le<1>(in, what));
}
std::uint32_t read_u32(std::istream& in, std::string_view what) {
  return static_cast<std::uint32_t>(get_le<4>(in, what));
}
std::int32_t read_i32(std::istream& in, std::string_view what) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(get_le<4>(in, what)));
}
double read_f64(std::istream& in, std::string_view what) {
  return std::bit_cast<double>(get_le<8>(in, what));
}

void read_f64s(std::istream& in, std::span<double> values, std::string_view what) {
  for (double& v : values) {
    v = read_f64(in, what);
  }
}

std::string read_string(std::istream& in, std::string_view what) {
  const std::uint32_t n = read_u32(in, what);
  // Guard against absurd lengths from corrupted files before allocating.
  if (n > (1u << 20)) {
    throw SchemaError("string length out of range while reading " + std::string(what));
  }
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n)) {
    throw SchemaError("truncated file while reading " + std::string(what));
  }
  return s;
}

bool at_end(std::istream& in) {
  return in.peek() == std::char_traits<char>::eof();
}

}  // namespace ampkin::binary
