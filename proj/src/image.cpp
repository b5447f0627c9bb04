#include "shapereg/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shapereg/error.hpp"

namespace shapereg {

namespace {

void check_dimensions(int width, int height) {
  if (width < 1 || height < 1) {
    throw ContractError("image dimensions must be positive, got " +
                        std::to_string(width) + "x" + std::to_string(height));
  }
}

std::size_t checked_index(int x, int y, int width, int height) {
  if (x < 0 || y < 0 || x >= width || y >= height) {
    throw ContractError("pixel (" + std::to_string(x) + ", " +
                        std::to_string(y) + ") outside " +
                        std::to_string(width) + "x" + std::to_string(height));
  }
  return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
         static_cast<std::size_t>(x);
}

}  // namespace

RasterImage::RasterImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

std::size_t RasterImage::index(int x, int y) const {
  return checked_index(x, y, width_, height_);
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

std::size_t GrayImage::index(int x, int y) const {
  return checked_index(x, y, width_, height_);
}

BinaryImage::BinaryImage(int width, int height)
    : BinaryImage(width, height, Point2{width / 2.0, height / 2.0}) {}

BinaryImage::BinaryImage(int width, int height, Point2 center)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
  set_center(center);
}

void BinaryImage::set_center(Point2 center) {
  if (!(center.x >= 0.0 && center.x <= width_ && center.y >= 0.0 &&
        center.y <= height_)) {
    throw ContractError("segmentation center must lie within the frame");
  }
  center_ = center;
}

std::size_t BinaryImage::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::size_t BinaryImage::index(int x, int y) const {
  return checked_index(x, y, width_, height_);
}

std::uint8_t luminance(Rgb px) noexcept {
  const double l = 0.2126 * px.r + 0.7152 * px.g + 0.0722 * px.b;
  // Round half up. The small epsilon absorbs representation error in the
  // coefficients so that uniform grey maps back onto itself.
  const double rounded = std::floor(l + 0.5 + 1e-9);
  return static_cast<std::uint8_t>(std::clamp(rounded, 0.0, 255.0));
}

GrayImage luminance(const RasterImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(x, y, luminance(img.at(x, y)));
  }
  return out;
}

std::uint8_t binarize(std::uint8_t gray) noexcept {
  return static_cast<std::uint8_t>(gray / 128);
}

BinaryImage binarize(const GrayImage& gray) {
  BinaryImage out(gray.width(), gray.height());
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) {
      out.set(x, y, binarize(gray.at(x, y)) != 0);
    }
  }
  return out;
}

BinaryImage to_binary(const RasterImage& img) { return binarize(luminance(img)); }

GrayImage to_gray(const BinaryImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(x, y, img.at(x, y) ? 255 : 0);
  }
  return out;
}

}  // namespace shapereg
