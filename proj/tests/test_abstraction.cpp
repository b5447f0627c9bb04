#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "shapereg/abstraction.hpp"
#include "shapereg/error.hpp"
#include "shapereg/harness.hpp"
#include "shapereg/search.hpp"

using namespace shapereg;

TEST_CASE("cell_of interval arithmetic") {
  CHECK(cell_of({0.5, 45.0}, 4, 3) == Cell{0, 1});
  CHECK(cell_of({1.0, 360.0}, 4, 3) == Cell{3, 2});
  CHECK(cell_of({0.0, 0.0}, 4, 3) == Cell{3, 0});
  CHECK(cell_of({1.0000001, 10.0}, 4, 3) == std::nullopt);

  const auto c = cell_of({0.34, 91.0}, 4, 3);
  const auto brute = oracle::claiming_cells({0.34, 91.0}, 4, 3);
  REQUIRE(brute.size() == 1);
  CHECK(c == brute[0]);
  CHECK(c == Cell{1, 1});
}

TEST_CASE("segment_of_pixel agrees with the interval scan everywhere") {
  const BinaryImage img(17, 13);
  for (const auto& [n, m] : {std::pair{1, 1}, {4, 3}, {6, 5}, {8, 8}, {13, 2}}) {
    for (const Point2 c : {img.center(), Point2{3.0, 9.5}, Point2{0.0, 0.0}}) {
      SegmentationParams p{n, m, c, 9.0};
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
          const auto got = segment_of_pixel(x, y, p);
          const auto pol = oracle::polar(x, y, c, p.radius);
          const auto brute = oracle::claiming_cells(pol, n, m);
          if (pol.r > 1.0) {
            REQUIRE(brute.empty());
            REQUIRE_FALSE(got.has_value());
          } else {
            // partition: exactly one cell claims each in-radius pixel
            REQUIRE(brute.size() == 1);
            REQUIRE(got == brute[0]);
          }
        }
      }
    }
  }
}

TEST_CASE("segmentation params are validated") {
  CHECK_THROWS_AS((SegmentationParams{0, 1, {}, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((SegmentationParams{1, 0, {}, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((SegmentationParams{1, 1, {}, 0.0}.validate()), ConfigError);
  CHECK(default_radius(6, 8) == doctest::Approx(5.0));
}

TEST_CASE("raw counts match the brute-force classifier") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const BinaryImage img = generate_shape({ShapeKind::Composite, 48, 40, 6, seed});
    for (int k : {1, 3, 8}) {
      const SegmentationParams p = make_params(img, k, k + 1);
      const AbstractionMatrix raw = raw_counts(img, p);
      CHECK(raw.values() == oracle::counts(img, k, k + 1, p.center, p.radius));
      // default radius covers the frame, so nothing is lost
      CHECK(raw.sum() == doctest::Approx(static_cast<double>(img.count())));
    }
  }
}

TEST_CASE("degenerate partitions") {
  BinaryImage empty(10, 10);
  const auto z = abstract(empty, make_params(empty, 4, 4));
  CHECK(z.sum() == 0.0);

  BinaryImage img(10, 10);
  img.set(1, 1, true);
  img.set(5, 5, true);
  img.set(9, 0, true);
  const auto one = raw_counts(img, make_params(img, 1, 1));
  CHECK(one.sectors() == 1);
  CHECK(one(0, 0) == 3.0);

  // tighter radius drops the corners
  const auto tight = raw_counts(img, SegmentationParams{1, 1, img.center(), 2.0});
  CHECK(tight(0, 0) == 1.0);
}

TEST_CASE("single pixel lands in one cell") {
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      BinaryImage img(8, 8);
      img.set(x, y, true);
      const auto p = make_params(img, 4, 2);
      const auto g = raw_counts(img, p);
      const auto cell = segment_of_pixel(x, y, p);
      REQUIRE(cell.has_value());
      int nonzero = 0;
      for (int n = 0; n < 4; ++n) {
        for (int m = 0; m < 2; ++m) nonzero += g(n, m) != 0.0;
      }
      CHECK(nonzero == 1);
      CHECK(g(cell->sector, cell->segment) == 1.0);
    }
  }
}

TEST_CASE("normalize to unit mean") {
  CHECK(normalize(AbstractionMatrix::from_rows({{2, 2}, {2, 2}})) ==
        AbstractionMatrix::from_rows({{1, 1}, {1, 1}}));
  CHECK(normalize(AbstractionMatrix::from_rows({{0, 0}, {0, 0}})).sum() == 0.0);
  CHECK(normalize(AbstractionMatrix::from_rows({{1, 3}, {0, 0}})) ==
        AbstractionMatrix::from_rows({{1, 3}, {0, 0}}));
  const auto g = normalize(AbstractionMatrix::from_rows({{5, 0, 1}, {2, 7, 3}}));
  CHECK(g.sum() == doctest::Approx(6.0));
  CHECK(g(1, 1) == doctest::Approx(7.0 / 3.0));
}

TEST_CASE("matrix construction rejects bad values") {
  CHECK_THROWS_AS(AbstractionMatrix(2, 2, {1.0, 2.0}), ContractError);
  CHECK_THROWS_AS(AbstractionMatrix(1, 2, {1.0, -2.0}), ContractError);
  CHECK_THROWS_AS(AbstractionMatrix(1, 1, {std::nan("")}), ContractError);
  CHECK_THROWS_AS(AbstractionMatrix(0, 1), ContractError);
}

TEST_CASE("cached polar samples reproduce the direct abstraction") {
  const BinaryImage img = generate_shape({ShapeKind::Bee, 90, 70, 0, 1});
  const PolarSamples samples(img, img.center(), default_radius(90, 70));
  CHECK(samples.size() == img.count());
  for (int k : {2, 8, 16}) {
    CHECK(samples.raw_counts(k, k).values() == raw_counts(img, make_params(img, k, k)).values());
    CHECK(samples.abstract(k, k).values() == abstract(img, make_params(img, k, k)).values());
  }
}

TEST_CASE("segment grid pairs sector directions with counts") {
  const BinaryImage img = generate_shape({ShapeKind::Circles, 32, 32, 4, 5});
  const auto p = make_params(img, 4, 2);
  const SegmentGrid grid = segment_grid(img, p);
  const auto raw = raw_counts(img, p);
  for (int n = 0; n < 4; ++n) {
    for (int m = 0; m < 2; ++m) {
      const auto& v = grid.at(n, m);
      CHECK(v.gamma == raw(n, m));
      CHECK(std::hypot(v.x, v.y) == doctest::Approx(1.0));
      CHECK(std::atan2(v.y, v.x) * 180.0 / std::numbers::pi ==
            doctest::Approx(n * 90.0 + 45.0 - (n >= 2 ? 360.0 : 0.0)));
    }
  }
}

TEST_CASE("abstraction is resolution independent") {
  const BinaryImage small = generate_shape({ShapeKind::Bee, 100, 100, 0, 1});
  const BinaryImage large = generate_shape({ShapeKind::Bee, 1000, 1000, 0, 1});
  for (int k : {4, 8}) {
    const auto gs = abstract(small, make_params(small, k, k));
    const auto gl = abstract(large, make_params(large, k, k));
    CHECK(gs.sectors() == gl.sectors());
    CHECK(gs.segments() == gl.segments());
    CHECK(oracle::relative_l1(gl.values(), gs.values()) <= 0.1);
  }
}

TEST_CASE("rotating by one sector shifts the abstraction by one row") {
  for (std::uint64_t seed : {1u, 4u, 9u}) {
    for (const auto& spec : {ShapeSpec{ShapeKind::Bee, 128, 128, 0, 1},
                             ShapeSpec{ShapeKind::Composite, 64, 64, 10, seed},
                             ShapeSpec{ShapeKind::Circles, 96, 96, 6, seed}}) {
      const BinaryImage img = generate_shape(spec);
      for (int n : {4, 8}) {
        const BinaryImage rot = rotate_raster(img, 360.0 / n);
        const auto expected = circular_shift(abstract(img, make_params(img, n, n)), 1);
        const auto got = abstract(rot, make_params(rot, n, n));
        CHECK(oracle::relative_l1(expected.values(), got.values()) <= 0.15);
      }
    }
  }
}
