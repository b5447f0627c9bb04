#pragma once

#include <cstdint>
#include <vector>

namespace shapereg {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Real-valued position in pixel units. x grows to the right, y grows
/// downwards (row index), matching raster storage.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Row-major RGB raster.
class RasterImage {
 public:
  RasterImage(int width, int height, Rgb fill = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
  void set(int x, int y, Rgb value) { pixels_[index(x, y)] = value; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y) const;

  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

/// Single-channel 8-bit luminance raster.
class GrayImage {
 public:
  GrayImage(int width, int height, std::uint8_t fill = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  void set(int x, int y, std::uint8_t value) { pixels_[index(x, y)] = value; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const;

  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// Raster of {0,1} pixels plus the origin used for polar segmentation.
///
/// The center defaults to the geometric frame center (width/2, height/2) and
/// must stay inside [0, width] x [0, height].
class BinaryImage {
 public:
  BinaryImage(int width, int height);
  BinaryImage(int width, int height, Point2 center);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Point2 center() const noexcept { return center_; }
  void set_center(Point2 center);

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  std::uint8_t at(int x, int y) const { return bits_[index(x, y)]; }
  void set(int x, int y, bool value) { bits_[index(x, y)] = value ? 1 : 0; }

  /// Number of 1-pixels.
  std::size_t count() const noexcept;

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  std::size_t index(int x, int y) const;

  int width_;
  int height_;
  Point2 center_;
  std::vector<std::uint8_t> bits_;
};

/// Per-pixel L = 0.2126 R + 0.7152 G + 0.0722 B, rounded half-up and clamped
/// to [0, 255].
std::uint8_t luminance(Rgb px) noexcept;
GrayImage luminance(const RasterImage& img);

/// B = floor(L / 128). The result is centered on the frame.
std::uint8_t binarize(std::uint8_t gray) noexcept;
BinaryImage binarize(const GrayImage& gray);

/// luminance followed by binarize.
BinaryImage to_binary(const RasterImage& img);

/// Expands {0,1} to {0,255} grey, the inverse embedding of binarize.
GrayImage to_gray(const BinaryImage& img);

}  // namespace shapereg
