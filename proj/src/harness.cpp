#include "shapereg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shapereg/error.hpp"

namespace shapereg {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Everything generated stays within this radius (frame units) of the center.
constexpr double kContentRadius = 0.45;

struct Frame {
  int width;
  int height;
  double scale;  // pixels per frame unit

  Frame(int w, int h) : width(w), height(h), scale(std::min(w, h)) {}

  Point2 to_units(int x, int y) const {
    return {(x + 0.5 - width / 2.0) / scale, (height / 2.0 - (y + 0.5)) / scale};
  }
  double px(double u) const { return u * scale + width / 2.0 - 0.5; }
  double py(double v) const { return height / 2.0 - v * scale - 0.5; }
};

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double segment_distance(Point2 p, Point2 a, Point2 b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, {a.x + t * vx, a.y + t * vy});
}

// Bounding box of a primitive in frame units, and its inside test. Thin
// features are widened to at least one pixel so they stay connected at low
// resolution.
struct Footprint {
  double min_u, max_u, min_v, max_v;
};

template <typename Inside>
void paint(BinaryImage& img, const Frame& frame, Footprint box, bool ink, Inside inside) {
  const int x0 = std::max(0, static_cast<int>(std::floor(frame.px(box.min_u))));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(frame.px(box.max_u))));
  const int y0 = std::max(0, static_cast<int>(std::floor(frame.py(box.max_v))));
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(frame.py(box.min_v))));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (inside(frame.to_units(x, y))) img.set(x, y, ink);
    }
  }
}

void paint_primitive(BinaryImage& img, const Frame& frame, const Primitive& prim) {
  const double min_half = 0.5 / frame.scale;
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Disc>) {
          const double r = std::max(g.radius, min_half);
          paint(img, frame, {g.center.x - r, g.center.x + r, g.center.y - r, g.center.y + r},
                prim.ink, [&](Point2 p) { return distance(p, g.center) <= r; });
        } else if constexpr (std::is_same_v<T, Ring>) {
          const double half = std::max(g.width / 2.0, min_half);
          const double r = g.radius + half;
          paint(img, frame, {g.center.x - r, g.center.x + r, g.center.y - r, g.center.y + r},
                prim.ink,
                [&](Point2 p) { return std::abs(distance(p, g.center) - g.radius) <= half; });
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          const double r = std::max(g.rx, g.ry);
          const double c = std::cos(-g.angle * kDegToRad);
          const double s = std::sin(-g.angle * kDegToRad);
          paint(img, frame, {g.center.x - r, g.center.x + r, g.center.y - r, g.center.y + r},
                prim.ink, [&](Point2 p) {
                  const double dx = p.x - g.center.x;
                  const double dy = p.y - g.center.y;
                  const double u = (c * dx - s * dy) / g.rx;
                  const double v = (s * dx + c * dy) / g.ry;
                  return u * u + v * v <= 1.0;
                });
        } else {
          const double half = std::max(g.width / 2.0, min_half);
          paint(img, frame,
                {std::min(g.from.x, g.to.x) - half, std::max(g.from.x, g.to.x) + half,
                 std::min(g.from.y, g.to.y) - half, std::max(g.from.y, g.to.y) + half},
                prim.ink, [&](Point2 p) { return segment_distance(p, g.from, g.to) <= half; });
        }
      },
      prim.geometry);
}

Point2 random_point(Rng& rng, double radius) {
  const double r = radius * std::sqrt(rng.uniform(0.0, 1.0));
  const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return {r * std::cos(a), r * std::sin(a)};
}

void add_lines(Shape& shape, Rng& rng, int count) {
  for (int i = 0; i < count; ++i) {
    Point2 from;
    Point2 to;
    do {
      from = random_point(rng, kContentRadius);
      const double len = rng.uniform(0.15, 0.4);
      const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
      to = {from.x + len * std::cos(a), from.y + len * std::sin(a)};
    } while (std::hypot(to.x, to.y) > kContentRadius);
    shape.push_back({Stroke{from, to, rng.uniform(0.01, 0.03)}});
  }
}

void add_circles(Shape& shape, Rng& rng, int count) {
  for (int i = 0; i < count; ++i) {
    const bool filled = i % 2 == 0;
    const double r = filled ? rng.uniform(0.03, 0.1) : rng.uniform(0.05, 0.15);
    const Point2 c = random_point(rng, kContentRadius - r - 0.01);
    if (filled) {
      shape.push_back({Disc{c, r}});
    } else {
      shape.push_back({Ring{c, r, 0.015}});
    }
  }
}

void add_speckle(Shape& shape, Rng& rng, int count, Point2 center, double spread) {
  for (int i = 0; i < count; ++i) {
    const Point2 p = random_point(rng, spread);
    shape.push_back({Disc{{center.x + p.x, center.y + p.y}, 0.006}});
  }
}

Point2 along(Point2 origin, double angle_deg, double distance_units) {
  return {origin.x + distance_units * std::cos(angle_deg * kDegToRad),
          origin.y + distance_units * std::sin(angle_deg * kDegToRad)};
}

// Dorsal view: abdomen, thorax and head along the body axis with wings,
// legs and antennae mirrored on both sides. Layout in bee units, scaled by
// kBeeScale into frame units.
constexpr double kBeeAxis = 25.0;
constexpr double kBeeScale = 1.15;
constexpr Point2 kBeeOrigin{-0.02, -0.01};

Point2 bee_point(double u, double v) {
  return along(along(kBeeOrigin, kBeeAxis, kBeeScale * u), kBeeAxis + 90.0, kBeeScale * v);
}

Shape make_bee() {
  constexpr double k = kBeeScale;
  constexpr double axis = kBeeAxis;
  const auto local = bee_point;
  Shape s;

  for (double side : {1.0, -1.0}) {
    s.push_back({Ellipse{local(0.0, side * 0.21), k * 0.25, k * 0.13, axis - side * 35.0}});
    s.push_back({Ellipse{local(-0.12, side * 0.17), k * 0.19, k * 0.1, axis - side * 55.0}});
    s.push_back({Stroke{local(0.06, side * 0.12), local(-0.08, side * 0.34), k * 0.01}, false});
  }
  for (double side : {1.0, -1.0}) {
    for (const auto& [u, du] : {std::pair{0.14, 0.12}, std::pair{0.09, 0.0}, std::pair{0.04, -0.12}}) {
      const Point2 hip = local(u, side * 0.08);
      const Point2 knee = local(u + du * 0.5, side * 0.17);
      s.push_back({Stroke{hip, knee, k * 0.018}});
      s.push_back({Stroke{knee, local(u + du, side * 0.22), k * 0.012}});
    }
    s.push_back({Stroke{local(0.3, side * 0.03), local(0.38, side * 0.09), k * 0.012}});
    s.push_back({Stroke{local(0.38, side * 0.09), local(0.41, side * 0.15), k * 0.012}});
  }

  s.push_back({bee_body()});
  for (double u : {-0.05, -0.13, -0.21}) {
    s.push_back({Stroke{local(u, -0.16), local(u, 0.16), k * 0.028}, false});
  }
  s.push_back({Disc{local(0.1, 0.0), k * 0.1}});
  s.push_back({Disc{local(0.24, 0.0), k * 0.075}});
  for (double side : {1.0, -1.0}) s.push_back({Disc{local(0.26, side * 0.045), k * 0.022}, false});
  s.push_back({Stroke{local(-0.34, 0.0), local(-0.4, 0.0), k * 0.015}});
  return s;
}

}  // namespace

std::uint64_t Rng::index(std::uint64_t n) {
  if (n == 0) throw ContractError("Rng::index needs a positive bound");
  // Multiply-shift range reduction on the full 64-bit draw.
  __extension__ using Wide = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<Wide>(next()) * n) >> 64);
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
}

BinaryImage rasterize(const Shape& shape, int width, int height) {
  BinaryImage img(width, height);
  const Frame frame(width, height);
  for (const Primitive& p : shape) paint_primitive(img, frame, p);
  return img;
}

void draw_line(BinaryImage& img, int x0, int y0, int x1, int y1) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (img.contains(x0, y0)) img.set(x0, y0, true);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void fill_disc(BinaryImage& img, double cx, double cy, double radius) {
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(cx + radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(cy + radius)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (std::hypot(x + 0.5 - cx, y + 0.5 - cy) <= radius) img.set(x, y, true);
    }
  }
}

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Lines: return "lines";
    case ShapeKind::Circles: return "circles";
    case ShapeKind::Noise: return "noise";
    case ShapeKind::Composite: return "composite";
    case ShapeKind::Bee: return "bee";
  }
  return "unknown";
}

ShapeKind shape_kind_from_string(const std::string& name) {
  for (ShapeKind k : {ShapeKind::Lines, ShapeKind::Circles, ShapeKind::Noise,
                      ShapeKind::Composite, ShapeKind::Bee}) {
    if (to_string(k) == name) return k;
  }
  throw ContractError("unknown shape kind '" + name + "'");
}

Ellipse bee_body() {
  return Ellipse{bee_point(-0.12, 0.0), kBeeScale * 0.21, kBeeScale * 0.16, kBeeAxis};
}

Shape make_shape(ShapeKind kind, int count, std::uint64_t seed) {
  if (count < 0) throw ContractError("primitive count must be >= 0");
  Rng rng(seed);
  Shape s;
  switch (kind) {
    case ShapeKind::Lines:
      add_lines(s, rng, count);
      break;
    case ShapeKind::Circles:
      add_circles(s, rng, count);
      break;
    case ShapeKind::Noise:
      add_speckle(s, rng, count * 40, {0.0, 0.0}, kContentRadius);
      break;
    case ShapeKind::Composite: {
      add_lines(s, rng, count / 2 + 1);
      add_circles(s, rng, count / 2 + 1);
      const Point2 cluster = random_point(rng, kContentRadius - 0.1);
      add_speckle(s, rng, count * 5, cluster, 0.08);
      break;
    }
    case ShapeKind::Bee:
      s = make_bee();
      break;
  }
  return s;
}

BinaryImage generate_shape(const ShapeSpec& spec) {
  if (spec.width < 1 || spec.height < 1) throw ContractError("shape dimensions must be positive");
  return rasterize(make_shape(spec.kind, spec.count, spec.seed), spec.width, spec.height);
}

Point2 rotate_point(Point2 p, double degrees) {
  const double c = std::cos(degrees * kDegToRad);
  const double s = std::sin(degrees * kDegToRad);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

BinaryImage rotate_raster(const BinaryImage& img, double degrees) {
  BinaryImage out(img.width(), img.height(), img.center());
  const Point2 center = img.center();
  const double c = std::cos(degrees * kDegToRad);
  const double s = std::sin(degrees * kDegToRad);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!img.at(x, y)) continue;
      const double rx = x + 0.5 - center.x;
      const double ry = center.y - (y + 0.5);
      const double qx = c * rx - s * ry;
      const double qy = s * rx + c * ry;
      const auto tx = static_cast<int>(std::round(qx + center.x - 0.5));
      const auto ty = static_cast<int>(std::round(center.y - qy - 0.5));
      if (out.contains(tx, ty)) out.set(tx, ty, true);
    }
  }
  return out;
}

Rect centered_rect(Point2 center, long long area, int width, int height) {
  const int side_w = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(area))));
  const int side_h = static_cast<int>((area + side_w - 1) / side_w);
  int x = static_cast<int>(std::lround(center.x - side_w / 2.0));
  int y = static_cast<int>(std::lround(center.y - side_h / 2.0));
  x = std::clamp(x, 0, std::max(0, width - side_w));
  y = std::clamp(y, 0, std::max(0, height - side_h));
  return {x, y, std::min(side_w, width - x), std::min(side_h, height - y)};
}

BinaryImage add_noise(const BinaryImage& img, const NoiseSpec& spec) {
  BinaryImage out = img;
  if (spec.draws == 0) return out;
  Rng rng(spec.seed);
  if (const auto* rect = std::get_if<Rect>(&spec.region)) {
    if (rect->width < 1 || rect->height < 1 || rect->x < 0 || rect->y < 0 ||
        rect->x + rect->width > img.width() || rect->y + rect->height > img.height()) {
      throw ContractError("noise region must be a non-empty rectangle inside the frame");
    }
    const auto area = static_cast<std::uint64_t>(rect->area());
    for (std::uint64_t i = 0; i < spec.draws; ++i) {
      const std::uint64_t k = rng.index(area);
      out.set(rect->x + static_cast<int>(k % rect->width),
              rect->y + static_cast<int>(k / rect->width), true);
    }
    return out;
  }
  const auto& mask = std::get<BinaryImage>(spec.region);
  if (mask.width() != img.width() || mask.height() != img.height()) {
    throw ContractError("noise mask must match the image dimensions");
  }
  std::vector<std::pair<int, int>> pixels;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y)) pixels.emplace_back(x, y);
    }
  }
  if (pixels.empty()) throw ContractError("noise mask is empty");
  for (std::uint64_t i = 0; i < spec.draws; ++i) {
    const auto& [x, y] = pixels[rng.index(pixels.size())];
    out.set(x, y, true);
  }
  return out;
}

OracleResult oracle_rotation(const BinaryImage& a, const BinaryImage& b, double step) {
  if (!(step > 0.0)) throw ContractError("oracle step must be positive");
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ContractError("oracle needs equally sized frames");
  }
  const int w = a.width();
  const int h = a.height();
  const std::size_t total = static_cast<std::size_t>(w) * h;
  const std::size_t ones_b = b.count();

  std::vector<std::pair<double, double>> ones_a;  // centered coordinates
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (a.at(x, y)) ones_a.emplace_back(x + 0.5 - a.center().x, a.center().y - (y + 0.5));
    }
  }

  std::vector<std::uint32_t> stamp(total, 0);
  OracleResult result;
  std::size_t best = 0;
  const auto steps = static_cast<std::size_t>(std::ceil(360.0 / step - 1e-9));
  for (std::size_t i = 0; i < steps; ++i) {
    const double angle = static_cast<double>(i) * step;
    const auto generation = static_cast<std::uint32_t>(i + 1);
    const double c = std::cos(angle * kDegToRad);
    const double s = std::sin(angle * kDegToRad);
    std::size_t rotated = 0;
    std::size_t both = 0;
    for (const auto& [rx, ry] : ones_a) {
      const auto tx = static_cast<int>(std::round(c * rx - s * ry + a.center().x - 0.5));
      const auto ty = static_cast<int>(std::round(a.center().y - (s * rx + c * ry) - 0.5));
      if (tx < 0 || ty < 0 || tx >= w || ty >= h) continue;
      const std::size_t k = static_cast<std::size_t>(ty) * w + tx;
      if (stamp[k] == generation) continue;
      stamp[k] = generation;
      ++rotated;
      if (b.bits()[k]) ++both;
    }
    const std::size_t agreement = total - (rotated + ones_b - 2 * both);
    result.table.push_back({angle, agreement});
    if (i == 0 || agreement > best) {
      best = agreement;
      result.best_angle = angle;
    }
  }
  return result;
}

Rect bee_noise_region(int width, int height, double theta) {
  const double scale = std::min(width, height);
  const Ellipse body = bee_body();
  const Point2 moved = rotate_point({body.center.x * scale, body.center.y * scale}, theta);
  return centered_rect({width / 2.0 + moved.x, height / 2.0 - moved.y}, 120'000, width, height);
}

CaseOutcome run_case(const ExperimentCase& c, const SearchConfig& cfg) {
  BinaryImage a = generate_shape(c.shape);
  BinaryImage b = rotate_raster(a, c.theta);
  if (c.noise_draws > 0) {
    Rect region = c.noise_region.value_or(
        c.shape.kind == ShapeKind::Bee ? bee_noise_region(a.width(), a.height(), c.theta)
                                       : Rect{0, 0, a.width(), a.height()});
    b = add_noise(b, {region, c.noise_draws, c.noise_seed});
  }
  ExperimentReport report = run(a, b, cfg);
  report.label = c.name;
  report.ground_truth = c.theta;
  report.seed = c.noise_seed;
  return {std::move(a), std::move(b), std::move(report)};
}

std::vector<ExperimentReport> run_noise_suite(const BinaryImage& a, double theta,
                                              const std::vector<std::uint64_t>& levels,
                                              const Rect& region, std::uint64_t seed,
                                              const SearchConfig& cfg) {
  const BinaryImage rotated = rotate_raster(a, theta);
  std::vector<ExperimentReport> reports;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const BinaryImage b = add_noise(rotated, {region, levels[i], seed});
    ExperimentReport report = run(a, b, cfg);
    report.label = "T" + std::to_string(i + 1);
    report.ground_truth = theta;
    report.seed = seed;
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<ExperimentCase> default_noise_cases(std::uint64_t seed) {
  std::vector<ExperimentCase> cases;
  for (std::size_t i = 0; i < kNoiseLevels.size(); ++i) {
    ExperimentCase c;
    c.name = "T" + std::to_string(i + 1);
    c.shape = {ShapeKind::Bee, 764, 764, 0, seed};
    c.theta = 234.0;
    c.noise_draws = kNoiseLevels[i];
    c.noise_region = bee_noise_region(764, 764, 234.0);
    c.noise_seed = seed;
    cases.push_back(c);
  }
  return cases;
}

}  // namespace shapereg
