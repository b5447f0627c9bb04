#include "shapereg/abstraction.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "shapereg/error.hpp"

namespace shapereg {

void SegmentationParams::validate() const {
  if (sectors < 1) throw ConfigError("sector count must be >= 1");
  if (segments < 1) throw ConfigError("segment count must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigError("segmentation radius must be positive");
  }
}

double default_radius(int width, int height) {
  return 0.5 * std::hypot(static_cast<double>(width), static_cast<double>(height));
}

SegmentationParams make_params(const BinaryImage& img, int sectors, int segments) {
  SegmentationParams p{sectors, segments, img.center(),
                       default_radius(img.width(), img.height())};
  p.validate();
  return p;
}

PolarCoord pixel_polar(int x, int y, Point2 center, double radius) {
  const double dx = (x + 0.5) - center.x;
  const double dy = center.y - (y + 0.5);
  double phi = std::atan2(dy, dx) * (180.0 / std::numbers::pi);
  if (phi < 0.0) phi += 360.0;
  if (phi >= 360.0) phi -= 360.0;
  return {std::hypot(dx, dy) / radius, phi};
}

std::optional<Cell> cell_of(PolarCoord p, int sectors, int segments) {
  if (p.r > 1.0) return std::nullopt;
  // Intervals are open on the left: ((k-1)/K, k/K].
  int sector = static_cast<int>(std::ceil(p.phi * sectors / 360.0));
  if (sector < 1) sector = sectors;  // phi == 0 is phi == 360
  if (sector > sectors) sector = sectors;
  int segment = static_cast<int>(std::ceil(p.r * segments));
  if (segment < 1) segment = 1;  // r == 0
  if (segment > segments) segment = segments;
  return Cell{sector - 1, segment - 1};
}

std::optional<Cell> segment_of_pixel(int x, int y, const SegmentationParams& params) {
  return cell_of(pixel_polar(x, y, params.center, params.radius), params.sectors,
                 params.segments);
}

AbstractionMatrix::AbstractionMatrix(int sectors, int segments)
    : AbstractionMatrix(sectors, segments,
                        std::vector<double>(static_cast<std::size_t>(std::max(sectors, 0)) *
                                            static_cast<std::size_t>(std::max(segments, 0)))) {}

AbstractionMatrix::AbstractionMatrix(int sectors, int segments, std::vector<double> values,
                                     SegmentationParams params)
    : sectors_(sectors), segments_(segments), values_(std::move(values)), params_(params) {
  if (sectors < 1 || segments < 1) {
    throw ContractError("abstraction matrix needs at least one sector and segment");
  }
  if (values_.size() != static_cast<std::size_t>(sectors) * segments) {
    throw ContractError("abstraction matrix expects " + std::to_string(sectors) + "x" +
                        std::to_string(segments) + " values, got " +
                        std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ContractError("abstraction values must be finite and non-negative");
    }
  }
}

AbstractionMatrix AbstractionMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const int sectors = static_cast<int>(rows.size());
  const int segments = sectors ? static_cast<int>(rows.begin()->size()) : 0;
  std::vector<double> values;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != segments) throw ContractError("ragged rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return AbstractionMatrix(sectors, segments, std::move(values));
}

double AbstractionMatrix::sum() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

AbstractionMatrix raw_counts(const BinaryImage& img, const SegmentationParams& params) {
  params.validate();
  std::vector<double> counts(static_cast<std::size_t>(params.sectors) * params.segments, 0.0);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!img.at(x, y)) continue;
      if (auto cell = segment_of_pixel(x, y, params)) {
        counts[static_cast<std::size_t>(cell->sector) * params.segments + cell->segment] += 1.0;
      }
    }
  }
  return AbstractionMatrix(params.sectors, params.segments, std::move(counts), params);
}

AbstractionMatrix normalize(const AbstractionMatrix& raw) {
  const double mean = raw.sum() / static_cast<double>(raw.values().size());
  if (mean <= 0.0) return raw;
  std::vector<double> values = raw.values();
  for (double& v : values) v /= mean;
  return AbstractionMatrix(raw.sectors(), raw.segments(), std::move(values), raw.params());
}

AbstractionMatrix abstract(const BinaryImage& img, const SegmentationParams& params) {
  return normalize(raw_counts(img, params));
}

SegmentGrid segment_grid(const BinaryImage& img, const SegmentationParams& params) {
  const AbstractionMatrix counts = raw_counts(img, params);
  SegmentGrid grid{params.sectors, params.segments, {}};
  grid.cells.reserve(counts.values().size());
  for (int n = 0; n < params.sectors; ++n) {
    const double mid = (n + 0.5) * 360.0 / params.sectors * std::numbers::pi / 180.0;
    for (int m = 0; m < params.segments; ++m) {
      grid.cells.push_back({std::cos(mid), std::sin(mid), counts(n, m)});
    }
  }
  return grid;
}

PolarSamples::PolarSamples(const BinaryImage& img, Point2 center, double radius)
    : center_(center), radius_(radius) {
  if (!(radius > 0.0)) throw ContractError("radius must be positive");
  samples_.reserve(img.count());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!img.at(x, y)) continue;
      const PolarCoord p = pixel_polar(x, y, center, radius);
      if (p.r <= 1.0) samples_.push_back(p);
    }
  }
}

AbstractionMatrix PolarSamples::raw_counts(int sectors, int segments) const {
  SegmentationParams params{sectors, segments, center_, radius_};
  params.validate();
  std::vector<double> counts(static_cast<std::size_t>(sectors) * segments, 0.0);
  for (const PolarCoord& p : samples_) {
    const auto cell = cell_of(p, sectors, segments);
    counts[static_cast<std::size_t>(cell->sector) * segments + cell->segment] += 1.0;
  }
  return AbstractionMatrix(sectors, segments, std::move(counts), params);
}

AbstractionMatrix PolarSamples::abstract(int sectors, int segments) const {
  return normalize(raw_counts(sectors, segments));
}

}  // namespace shapereg
