#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace ampkin {

/// Grayscale image with values clamped to [0, 1], row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  /// Clamps every value into [0, 1]. Throws DimensionMismatchError on a size mismatch.
  GrayImage(int width, int height, std::vector<double> pixels);

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] double at(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)];
  }
  void set(int x, int y, double v);
  [[nodiscard]] const std::vector<double>& pixels() const { return pixels_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB image, row-major, interleaved.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, Rgb fill = {0, 0, 0});

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  [[nodiscard]] const std::vector<std::uint8_t>& bytes() const { return data_; }
  std::vector<std::uint8_t>& bytes() { return data_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Rec. 601 luma scaled to [0, 1].
[[nodiscard]] GrayImage to_gray(const RgbImage& img);

/// Vertical gradient used as a stand-in background when none is supplied.
[[nodiscard]] RgbImage gradient_background(int width, int height, Rgb top, Rgb bottom);

/// PNG I/O (8-bit RGB). Throws IoError on failure.
void write_png(const RgbImage& img, const std::filesystem::path& path);
[[nodiscard]] RgbImage read_png(const std::filesystem::path& path);

}  // namespace ampkin
