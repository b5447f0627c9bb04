#pragma once

#include <vector>

#include "shapereg/abstraction.hpp"

namespace shapereg {

struct SimilarityConfig {
  /// Neighbourhood depth d. 0 scores each cell on its own.
  int neighborhood_depth = 0;

  friend bool operator==(const SimilarityConfig&, const SimilarityConfig&) = default;
};

/// |a - b| / (a + b), with j(0, 0) = 0. Lower is better: 0 means the two
/// cells agree. Throws ContractError on negative input.
double cell_score(double a, double b);

/// Weight of ring i in the neighbourhood extension: log_{d+2}(d + 2 - i).
double ring_weight(int depth, int ring);

/// Cells at Chebyshev distance exactly `ring` from `cell`, measuring the
/// sector axis circularly and skipping segments outside [0, segments).
/// Each cell appears once even when the sector axis wraps onto itself.
std::vector<Cell> ring_cells(int sectors, int segments, Cell cell, int ring);

/// Sum of per-cell scores between two equally sized matrices. With a
/// positive neighbourhood depth each cell contributes extended_cell_score.
/// Throws ContractError on a dimension mismatch or when the depth is not
/// below min(N, M).
double matrix_score(const AbstractionMatrix& a, const AbstractionMatrix& b,
                    const SimilarityConfig& cfg = {});

/// matrix_score(circular_shift(a, shift), b) without materialising the
/// shifted matrix: sector n of `b` is paired with sector n - shift of `a`.
double matrix_score_shifted(const AbstractionMatrix& a, const AbstractionMatrix& b,
                            int shift, const SimilarityConfig& cfg = {});

/// j at `cell` plus the ring-weighted scores of its neighbours, comparing
/// each neighbour of `a` with the same-index neighbour of `b`.
double extended_cell_score(const AbstractionMatrix& a, const AbstractionMatrix& b,
                           Cell cell, const SimilarityConfig& cfg);

}  // namespace shapereg
