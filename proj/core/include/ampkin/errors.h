#pragma once

#include <stdexcept>
#include <string>

namespace ampkin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Stable machine-readable category, used by the CLI error JSON.
  [[nodiscard]] virtual const char* kind() const noexcept { return "error"; }
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "invalid_input"; }
};

/// A rotation encoding that cannot be decoded or produced (zero sentinel, parallel 6D columns).
class DegenerateRepresentationError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override {
    return "degenerate_representation";
  }
};

/// Point configurations too degenerate for alignment (coincident or collinear).
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "degenerate_geometry"; }
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "dimension_mismatch"; }
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "configuration"; }
};

/// A file that parses but violates a structural invariant of its format.
class SchemaError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "schema"; }
};

/// A file that could not be parsed at all. Carries the byte offset of the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(what + " (at byte " + std::to_string(byte_offset) + ")"), byte_offset_(byte_offset) {}
  [[nodiscard]] std::size_t byte_offset() const noexcept { return byte_offset_; }
  [[nodiscard]] const char* kind() const noexcept override { return "parse"; }

 private:
  std::size_t byte_offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "io"; }
};

}  // namespace ampkin
