#include "ampkin/image.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "ampkin/errors.h"

namespace ampkin {
namespace {

std::size_t index_of(int x, int y, int width) {
  return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
}

void check_size(int width, int height) {
  if (width < 0 || height < 0) {
    throw InvalidInputError("image dimensions must be non-negative");
  }
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

GrayImage::GrayImage(int width, int height, double fill)
    : GrayImage(width, height,
                std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                        static_cast<std::size_t>(std::max(height, 0)),
                                    fill)) {}

GrayImage::GrayImage(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_size(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DimensionMismatchError("pixel count does not match image size");
  }
  for (double& v : pixels_) {
    v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
  }
}

void GrayImage::set(int x, int y, double v) {
  pixels_[index_of(x, y, width_)] = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
}

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  check_size(width, height);
  data_.resize(3 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill[0];
    data_[i + 1] = fill[1];
    data_[i + 2] = fill[2];
  }
}

Rgb RgbImage::at(int x, int y) const {
  const std::size_t i = 3 * index_of(x, y, width_);
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void RgbImage::set(int x, int y, Rgb c) {
  const std::size_t i = 3 * index_of(x, y, width_);
  data_[i] = c[0];
  data_[i + 1] = c[1];
  data_[i + 2] = c[2];
}

GrayImage to_gray(const RgbImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Rgb c = img.at(x, y);
      out.set(x, y, (0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]) / 255.0);
    }
  }
  return out;
}

RgbImage gradient_background(int width, int height, Rgb top, Rgb bottom) {
  RgbImage img(width, height);
  for (int y = 0; y < height; ++y) {
    const double t = height > 1 ? static_cast<double>(y) / (height - 1) : 0.0;
    Rgb c{};
    for (std::size_t k = 0; k < 3; ++k) {
      c[k] = static_cast<std::uint8_t>(std::lround((1.0 - t) * top[k] + t * bottom[k]));
    }
    for (int x = 0; x < width; ++x) {
      img.set(x, y, c);
    }
  }
  return img;
}

void write_png(const RgbImage& img, const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
               static_cast<png_uint_32>(img.height()), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const auto& bytes = img.bytes();
  for (int y = 0; y < img.height(); ++y) {
    png_write_row(png, bytes.data() + 3 * index_of(0, y, img.width()));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

RgbImage read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) {
    throw IoError("cannot open " + path.string());
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialisation failed");
  }
  RgbImage img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed reading PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  // Normalise every input flavour to 8-bit RGB.
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_packing(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  const auto width = static_cast<int>(png_get_image_width(png, info));
  const auto height = static_cast<int>(png_get_image_height(png, info));
  img = RgbImage(width, height);
  auto& bytes = img.bytes();
  for (int y = 0; y < height; ++y) {
    png_read_row(png, bytes.data() + 3 * index_of(0, y, width), nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

}  // namespace ampkin
