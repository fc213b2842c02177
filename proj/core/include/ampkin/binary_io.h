#pragma once

// Little-endian readers/writers shared by the template, codebook and heatmap formats.

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace ampkin::binary {

void write_magic(std::ostream& out, std::string_view magic);
void write_u8(std::ostream& out, std::uint8_t v);
void write_u32(std::ostream& out, std::uint32_t v);
void write_i32(std::ostream& out, std::int32_t v);
void write_f64(std::ostream& out, double v);
void write_f64s(std::ostream& out, std::span<const double> values);
void write_string(std::ostream& out, std::string_view s);

/// Readers throw SchemaError naming `what` on truncation.
void expect_magic(std::istream& in, std::string_view magic);
std::uint8_t read_u8(std::istream& in, std::string_view what);
std::uint32_t read_u32(std::istream& in, std::string_view what);
std::int32_t read_i32(std::istream& in, std::string_view what);
double read_f64(std::istream& in, std::string_view what);
void read_f64s(std::istream& in, std::span<double> values, std::string_view what);
std::string read_string(std::istream& in, std::string_view what);

/// True when the stream has no bytes left.
bool at_end(std::istream& in);

}  // namespace ampkin::binary
