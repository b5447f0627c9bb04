#include "shapereg/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shapereg/error.hpp"

namespace shapereg {

namespace {

// Inputs are known non-negative. max() keeps the expression branch-free so
// scoring time does not depend on how sparse the matrices are; for s == 0
// the numerator is 0 as well.
inline double dissimilarity(double a, double b) noexcept {
  return std::abs(a - b) / std::max(a + b, std::numeric_limits<double>::min());
}

void check_pair(const AbstractionMatrix& a, const AbstractionMatrix& b,
                const SimilarityConfig& cfg) {
  if (a.sectors() != b.sectors() || a.segments() != b.segments()) {
    throw ContractError("dimension mismatch: " + std::to_string(a.sectors()) + "x" +
                        std::to_string(a.segments()) + " vs " +
                        std::to_string(b.sectors()) + "x" + std::to_string(b.segments()));
  }
  const int d = cfg.neighborhood_depth;
  if (d < 0) throw ContractError("neighbourhood depth must be >= 0");
  if (d > 0 && d >= std::min(a.sectors(), a.segments())) {
    throw ContractError("neighbourhood depth " + std::to_string(d) +
                        " must be below min(N, M) = " +
                        std::to_string(std::min(a.sectors(), a.segments())));
  }
}

int wrap(int value, int modulus) {
  const int r = value % modulus;
  return r < 0 ? r + modulus : r;
}

// Distinct sector offsets within `ring` of a sector, with their circular
// distance. Offsets that alias each other under wrap-around are kept once.
std::vector<std::pair<int, int>> sector_offsets(int sectors, int ring) {
  std::vector<std::pair<int, int>> out;
  std::vector<bool> seen(static_cast<std::size_t>(sectors), false);
  for (int dn = 0; dn <= ring; ++dn) {
    for (int sign : {1, -1}) {
      if (dn == 0 && sign < 0) continue;
      const int k = wrap(sign * dn, sectors);
      if (seen[static_cast<std::size_t>(k)]) continue;
      seen[static_cast<std::size_t>(k)] = true;
      out.emplace_back(sign * dn, std::min(k, sectors - k));
    }
  }
  return out;
}

// Per-cell scores of `a` shifted by `shift` against `b`.
std::vector<double> score_grid(const AbstractionMatrix& a, const AbstractionMatrix& b,
                               int shift) {
  const int sectors = a.sectors();
  const int segments = a.segments();
  std::vector<double> grid(static_cast<std::size_t>(sectors) * segments);
  for (int n = 0; n < sectors; ++n) {
    const double* ra = a.row(wrap(n - shift, sectors));
    const double* rb = b.row(n);
    double* out = grid.data() + static_cast<std::size_t>(n) * segments;
    for (int m = 0; m < segments; ++m) out[m] = dissimilarity(ra[m], rb[m]);
  }
  return grid;
}

}  // namespace

double cell_score(double a, double b) {
  if (a < 0.0 || b < 0.0 || std::isnan(a) || std::isnan(b)) {
    throw ContractError("cell_score needs non-negative inputs");
  }
  return dissimilarity(a, b);
}

double ring_weight(int depth, int ring) {
  if (depth < 1 || ring < 1 || ring > depth) {
    throw ContractError("ring index must be within 1..depth");
  }
  return std::log(static_cast<double>(depth + 2 - ring)) /
         std::log(static_cast<double>(depth + 2));
}

std::vector<Cell> ring_cells(int sectors, int segments, Cell cell, int ring) {
  if (ring < 0) throw ContractError("ring distance must be >= 0");
  std::vector<Cell> out;
  for (const auto& [offset, distance] : sector_offsets(sectors, ring)) {
    for (int dm = -ring; dm <= ring; ++dm) {
      const int m = cell.segment + dm;
      if (m < 0 || m >= segments) continue;
      if (std::max(distance, std::abs(dm)) != ring) continue;
      out.push_back({wrap(cell.sector + offset, sectors), m});
    }
  }
  return out;
}

double matrix_score_shifted(const AbstractionMatrix& a, const AbstractionMatrix& b, int shift,
                            const SimilarityConfig& cfg) {
  check_pair(a, b, cfg);
  const int sectors = a.sectors();
  const int segments = a.segments();
  const int depth = cfg.neighborhood_depth;

  if (depth == 0) {
    double total = 0.0;
    for (int n = 0; n < sectors; ++n) {
      const double* ra = a.row(wrap(n - shift, sectors));
      const double* rb = b.row(n);
      for (int m = 0; m < segments; ++m) total += dissimilarity(ra[m], rb[m]);
    }
    return total;
  }

  // Ring membership is symmetric, so summing every cell's neighbourhood is
  // the same as weighting each cell by how many rings it appears in. That
  // multiplicity only depends on the segment index.
  const std::vector<double> grid = score_grid(a, b, shift);
  std::vector<double> multiplicity(static_cast<std::size_t>(segments), 1.0);
  for (int m = 0; m < segments; ++m) {
    for (int i = 1; i <= depth; ++i) {
      multiplicity[static_cast<std::size_t>(m)] +=
          ring_weight(depth, i) * static_cast<double>(ring_cells(sectors, segments, {0, m}, i).size());
    }
  }
  double total = 0.0;
  for (int n = 0; n < sectors; ++n) {
    for (int m = 0; m < segments; ++m) {
      total += grid[static_cast<std::size_t>(n) * segments + m] *
               multiplicity[static_cast<std::size_t>(m)];
    }
  }
  return total;
}

double matrix_score(const AbstractionMatrix& a, const AbstractionMatrix& b,
                    const SimilarityConfig& cfg) {
  return matrix_score_shifted(a, b, 0, cfg);
}

double extended_cell_score(const AbstractionMatrix& a, const AbstractionMatrix& b, Cell cell,
                           const SimilarityConfig& cfg) {
  check_pair(a, b, cfg);
  if (cell.sector < 0 || cell.sector >= a.sectors() || cell.segment < 0 ||
      cell.segment >= a.segments()) {
    throw ContractError("cell outside the matrix");
  }
  double score = dissimilarity(a(cell.sector, cell.segment), b(cell.sector, cell.segment));
  for (int i = 1; i <= cfg.neighborhood_depth; ++i) {
    double ring_sum = 0.0;
    for (const Cell& k : ring_cells(a.sectors(), a.segments(), cell, i)) {
      ring_sum += dissimilarity(a(k.sector, k.segment), b(k.sector, k.segment));
    }
    score += ring_weight(cfg.neighborhood_depth, i) * ring_sum;
  }
  return score;
}

}  // namespace shapereg
