#pragma once

#include <initializer_list>
#include <optional>
#include <vector>

#include "shapereg/image.hpp"

namespace shapereg {

/// Polar partition of a frame into `sectors` angular wedges, each split into
/// `segments` rings of equal radial width.
struct SegmentationParams {
  int sectors = 1;
  int segments = 1;
  Point2 center;
  double radius = 1.0;

  /// Throws ConfigError unless sectors >= 1, segments >= 1 and radius > 0.
  void validate() const;

  friend bool operator==(const SegmentationParams&, const SegmentationParams&) = default;
};

/// Half the frame diagonal: every pixel center of a frame segmented from its
/// geometric center lies inside this radius.
double default_radius(int width, int height);

/// Parameters centered on the image's own segmentation center.
SegmentationParams make_params(const BinaryImage& img, int sectors, int segments);

/// Normalised polar coordinates. `r` is distance / radius, `phi` is the
/// counter-clockwise angle in degrees within [0, 360) with y pointing up.
struct PolarCoord {
  double r = 0.0;
  double phi = 0.0;
};

/// Polar coordinate of the center of pixel (x, y).
PolarCoord pixel_polar(int x, int y, Point2 center, double radius);

/// Zero-based cell index. Sector s covers angles (360 s/N, 360 (s+1)/N] and
/// segment m covers normalised radii (m/M, (m+1)/M].
struct Cell {
  int sector = 0;
  int segment = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Cell containing a polar coordinate, or nullopt when r > 1. The angle 0 is
/// the same direction as 360 and so falls in the last sector; r = 0 is placed
/// in the innermost segment.
std::optional<Cell> cell_of(PolarCoord p, int sectors, int segments);

/// cell_of applied to the center of pixel (x, y).
std::optional<Cell> segment_of_pixel(int x, int y, const SegmentationParams& params);

/// N x M grid of non-negative aggregates, stored sector-major.
class AbstractionMatrix {
 public:
  AbstractionMatrix(int sectors, int segments);
  AbstractionMatrix(int sectors, int segments, std::vector<double> values,
                    SegmentationParams params = {});
  /// One initializer row per sector.
  static AbstractionMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  int sectors() const noexcept { return sectors_; }
  int segments() const noexcept { return segments_; }
  const SegmentationParams& params() const noexcept { return params_; }

  double operator()(int sector, int segment) const {
    return values_[static_cast<std::size_t>(sector) * segments_ + segment];
  }
  const std::vector<double>& values() const noexcept { return values_; }
  /// Pointer to the `segments()` values of one sector.
  const double* row(int sector) const noexcept {
    return values_.data() + static_cast<std::size_t>(sector) * segments_;
  }

  double sum() const noexcept;

  friend bool operator==(const AbstractionMatrix&, const AbstractionMatrix&) = default;

 private:
  int sectors_;
  int segments_;
  std::vector<double> values_;
  SegmentationParams params_;
};

/// Count of 1-pixels per cell; pixels beyond the radius are skipped.
AbstractionMatrix raw_counts(const BinaryImage& img, const SegmentationParams& params);

/// Unit-mean scaling: every entry divided by the mean of all entries.
/// An all-zero matrix is returned unchanged.
AbstractionMatrix normalize(const AbstractionMatrix& raw);

/// The abstraction matrix: raw_counts followed by normalize.
AbstractionMatrix abstract(const BinaryImage& img, const SegmentationParams& params);

/// The segmentation matrix: each cell's unit direction (taken at the middle of
/// its sector) and its raw count.
struct SegmentVector {
  double x = 0.0;
  double y = 0.0;
  double gamma = 0.0;
};

struct SegmentGrid {
  int sectors = 0;
  int segments = 0;
  std::vector<SegmentVector> cells;

  const SegmentVector& at(int sector, int segment) const {
    return cells[static_cast<std::size_t>(sector) * segments + segment];
  }
};

SegmentGrid segment_grid(const BinaryImage& img, const SegmentationParams& params);

/// Polar coordinates of every in-radius 1-pixel of an image, computed once so
/// that abstractions at many (N, M) resolutions cost O(#pixels) each without
/// repeated trigonometry.
class PolarSamples {
 public:
  PolarSamples(const BinaryImage& img, Point2 center, double radius);

  Point2 center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return samples_.size(); }

  AbstractionMatrix raw_counts(int sectors, int segments) const;
  AbstractionMatrix abstract(int sectors, int segments) const;

 private:
  Point2 center_;
  double radius_;
  std::vector<PolarCoord> samples_;
};

}  // namespace shapereg
