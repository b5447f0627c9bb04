#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "shapereg/image.hpp"
#include "shapereg/search.hpp"

namespace shapereg {

/// Seedable generator with a fixed, implementation-independent mapping to
/// ranges (std:: distributions are not portable across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);
  /// Uniform real in [lo, hi).
  double uniform(double lo, double hi);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Synthetic shapes
//
// Geometry is described in frame units: the origin is the frame center, y
// points up and 1.0 equals the shorter frame side. The same description
// rasterises consistently at any resolution.

struct Disc {
  Point2 center;
  double radius = 0.0;
};

struct Ring {
  Point2 center;
  double radius = 0.0;
  double width = 0.0;
};

struct Ellipse {
  Point2 center;
  double rx = 0.0;
  double ry = 0.0;
  double angle = 0.0;  ///< degrees, counter-clockwise
};

/// Line segment of the given width with round caps.
struct Stroke {
  Point2 from;
  Point2 to;
  double width = 0.0;
};

struct Primitive {
  std::variant<Disc, Ring, Ellipse, Stroke> geometry;
  bool ink = true;  ///< false erases
};

using Shape = std::vector<Primitive>;

/// Sets every pixel whose center lies inside a primitive, in order.
BinaryImage rasterize(const Shape& shape, int width, int height);

/// Pixel-level drawing helpers.
void draw_line(BinaryImage& img, int x0, int y0, int x1, int y1);
void fill_disc(BinaryImage& img, double cx, double cy, double radius);

enum class ShapeKind { Lines, Circles, Noise, Composite, Bee };

std::string to_string(ShapeKind kind);
/// Throws ContractError for unknown names.
ShapeKind shape_kind_from_string(const std::string& name);

struct ShapeSpec {
  ShapeKind kind = ShapeKind::Composite;
  int width = 128;
  int height = 128;
  int count = 6;  ///< primitives per family; ignored for Bee
  std::uint64_t seed = 1;
};

/// Deterministic random figure kept inside the inscribed disc so rotations
/// about the center never leave the frame.
Shape make_shape(ShapeKind kind, int count, std::uint64_t seed);

/// make_shape + rasterize. Throws ContractError on invalid dimensions or count.
BinaryImage generate_shape(const ShapeSpec& spec);

/// Body of the Bee figure in frame units; the noise suite aims its noise here.
Ellipse bee_body();

// ---------------------------------------------------------------------------
// Raster rotation and noise

/// Counter-clockwise rotation of `p` (y up) by `degrees`.
Point2 rotate_point(Point2 p, double degrees);

/// Forward-maps every 1-pixel: its center, relative to the segmentation
/// center, is rotated counter-clockwise by `degrees` and rounded half away
/// from zero to a pixel. Several pixels may land on one target; pixels that
/// leave the frame are dropped.
BinaryImage rotate_raster(const BinaryImage& img, double degrees);

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  long long area() const noexcept { return static_cast<long long>(width) * height; }
};

struct NoiseSpec {
  /// Rectangle, or a mask whose 1-pixels form the region.
  std::variant<Rect, BinaryImage> region = Rect{};
  std::uint64_t draws = 0;
  std::uint64_t seed = 0;
};

/// `draws` uniform picks (with replacement) inside the region, each setting
/// the picked pixel to 1.
BinaryImage add_noise(const BinaryImage& img, const NoiseSpec& spec);

/// Rectangle of about `area` pixels centered on `center` (pixel
/// coordinates), clipped to the frame.
Rect centered_rect(Point2 center, long long area, int width, int height);

// ---------------------------------------------------------------------------
// Brute-force oracle

struct OracleEntry {
  double angle = 0.0;
  std::size_t agreement = 0;  ///< pixels equal between rotated A and B
};

struct OracleResult {
  double best_angle = 0.0;
  std::vector<OracleEntry> table;
};

/// Rotates `a` by every multiple of `step` below 360 and counts pixel-wise
/// agreement with `b`. Ties go to the smaller angle.
OracleResult oracle_rotation(const BinaryImage& a, const BinaryImage& b, double step);

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentCase {
  std::string name;
  ShapeSpec shape;
  double theta = 0.0;
  std::uint64_t noise_draws = 0;
  /// Noise region in the rotated frame; defaults to the rotated Bee body for
  /// Bee shapes and to the whole frame otherwise.
  std::optional<Rect> noise_region;
  std::uint64_t noise_seed = 0;
};

struct CaseOutcome {
  BinaryImage shape_a;
  BinaryImage shape_b;
  ExperimentReport report;
};

/// generate -> rotate -> noise -> search.
CaseOutcome run_case(const ExperimentCase& c, const SearchConfig& cfg);

/// Region of about 120K pixels over the rotated Bee body.
Rect bee_noise_region(int width, int height, double theta);

inline const std::vector<std::uint64_t> kNoiseLevels = {0, 5'000, 50'000, 500'000};

/// One report per noise level: B = rotate_raster(A, theta) plus noise in
/// `region`. Reports are labelled T1, T2, ...
std::vector<ExperimentReport> run_noise_suite(const BinaryImage& a, double theta,
                                              const std::vector<std::uint64_t>& levels,
                                              const Rect& region, std::uint64_t seed,
                                              const SearchConfig& cfg);

/// The four-test noise protocol on a 764 x 764 Bee rotated by 234 degrees.
std::vector<ExperimentCase> default_noise_cases(std::uint64_t seed = 2024);

}  // namespace shapereg
