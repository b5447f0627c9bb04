#include "shapereg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shapereg/error.hpp"

namespace shapereg {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::span<const AngleScore> top3(std::span<const AngleScore> ranked) {
  return ranked.first(std::min<std::size_t>(3, ranked.size()));
}

double wrap360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

}  // namespace

double candidate_weight(double score) {
  if (score < 0.0 || std::isnan(score)) throw ContractError("scores must be non-negative");
  return 1.0 / (score + kWeightFloor);
}

double circular_difference(double a, double b) {
  double d = std::fmod(a - b, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

double weighted_circular_mean(std::span<const AngleScore> items) {
  if (items.empty()) throw ContractError("mean of no angles");
  double sx = 0.0;
  double sy = 0.0;
  for (const AngleScore& it : items) {
    const double w = candidate_weight(it.score);
    sx += w * std::cos(it.angle * kDegToRad);
    sy += w * std::sin(it.angle * kDegToRad);
  }
  const double mean = wrap360(std::atan2(sy, sx) / kDegToRad);
  // Snap values that only differ from a whole angle by trigonometric noise.
  const double nearest = std::round(mean * 1e9) / 1e9;
  return wrap360(nearest);
}

double weighted_circular_variance(std::span<const AngleScore> items) {
  if (items.empty()) throw ContractError("variance of no angles");
  const double mu = weighted_circular_mean(items);
  std::vector<double> w;
  w.reserve(items.size());
  double sum_w = 0.0;
  double numerator = 0.0;
  for (const AngleScore& it : items) {
    const double wi = candidate_weight(it.score);
    const double dev = circular_difference(it.angle, mu);
    w.push_back(wi);
    sum_w += wi;
    numerator += wi * dev * dev;
  }
  // sum w - sum w^2 / sum w == 2 sum_{i<j} w_i w_j / sum w, which avoids
  // cancellation when one weight dominates.
  double cross = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = i + 1; j < w.size(); ++j) cross += w[i] * w[j];
  }
  const double denominator = 2.0 * cross / sum_w;
  if (denominator <= 0.0) return 0.0;
  return numerator / denominator;
}

double wm3(std::span<const AngleScore> ranked) {
  return weighted_circular_mean(top3(ranked));
}

double wv3(std::span<const AngleScore> ranked) {
  return weighted_circular_variance(top3(ranked));
}

ConvergenceMetrics convergence_metrics(std::span<const AngleScore> ranked, int level) {
  const auto best = top3(ranked);
  return {wm3(best), wv3(best), level, {best.begin(), best.end()}};
}

}  // namespace shapereg
