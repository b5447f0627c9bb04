#pragma once

#include <span>
#include <vector>

namespace shapereg {

struct AngleScore {
  double angle = 0.0;  ///< degrees
  double score = 0.0;  ///< dissimilarity, lower is better
};

/// Added to every score before inversion so that exact matches get a finite
/// weight.
inline constexpr double kWeightFloor = 1e-9;

/// Weight of a candidate in WM3/WV3: 1 / (score + kWeightFloor).
double candidate_weight(double score);

/// Signed shortest angular difference a - b, in (-180, 180].
double circular_difference(double a, double b);

/// Weighted circular mean of the angles in [0, 360). Angles are averaged as
/// weighted unit vectors so that 350 and 10 meet at 0, not 180.
double weighted_circular_mean(std::span<const AngleScore> items);

/// Weighted sample variance (degrees^2) of the signed circular deviations
/// from weighted_circular_mean, with the reliability-weight correction
///   V = sum w (x - mu)^2 / (sum w - sum w^2 / sum w).
/// A single item has variance 0.
double weighted_circular_variance(std::span<const AngleScore> items);

/// WM3 and WV3 over the first (up to) three entries of `ranked`.
double wm3(std::span<const AngleScore> ranked);
double wv3(std::span<const AngleScore> ranked);

struct ConvergenceMetrics {
  double wm3 = 0.0;
  double wv3 = 0.0;
  int level = 0;
  std::vector<AngleScore> top3;
};

/// Builds the metrics for one level from candidates sorted best first.
ConvergenceMetrics convergence_metrics(std::span<const AngleScore> ranked, int level);

}  // namespace shapereg
