#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shapereg/abstraction.hpp"
#include "shapereg/image.hpp"
#include "shapereg/similarity.hpp"
#include "shapereg/stats.hpp"

namespace shapereg {

/// Pixel offset applied to the second shape's segmentation center.
struct Translation {
  int tx = 0;
  int ty = 0;

  long long norm2() const noexcept {
    return static_cast<long long>(tx) * tx + static_cast<long long>(ty) * ty;
  }
  friend auto operator<=>(const Translation&, const Translation&) = default;
};

/// One transformation hypothesis: rotate the first shape by `shift` sectors
/// of the level's partition (counter-clockwise) and, optionally, move the
/// second shape's segmentation center by `translation`.
struct Candidate {
  int shift = 0;
  Translation translation;
  double score = 0.0;
  int level = 0;
  int sectors = 1;

  double angle() const noexcept { return shift * 360.0 / sectors; }
};

/// Ascending score, then smaller shift, then smaller |translation|, then the
/// translation components. Total, so rankings are deterministic.
bool ranks_before(const Candidate& lhs, const Candidate& rhs) noexcept;

struct SearchConfig {
  int omega = 3;        ///< first level; N = M = 2^omega
  int epsilon = 10;     ///< candidates retained per level
  int lambda = 10;      ///< refinement half-width, in shifts of the new level
  double rho = 1.0;     ///< target angular precision, degrees
  bool translation_enabled = false;
  int translation_stride = 8;
  SimilarityConfig similarity;
  /// Stop at the level where segments would shrink below one pixel.
  bool resolution_cap = true;

  /// Throws ConfigError on any out-of-range field.
  void validate() const;
};

struct IterationState {
  int level = 0;
  int sectors = 1;   ///< N_l
  int segments = 1;  ///< M_l
  std::vector<Candidate> delta;    ///< candidates to evaluate
  std::vector<Candidate> upsilon;  ///< best `epsilon` of delta, sorted
};

/// Partition size at a level: 2^level.
int partition_size(int level);

/// {360 i / N | i = 0 .. N-1}.
std::vector<double> rotation_set(int sectors);

/// Rotates sector rows by k: sector n of the result is sector (n - k) mod N
/// of the input. Any integer k is accepted and reduced modulo N.
AbstractionMatrix circular_shift(const AbstractionMatrix& g, int k);

/// Smallest l with 360 / 2^l <= rho, i.e. ceil(log2(360 / rho)).
int precision_level(double rho);

/// Average pixels per segment below which scores are dominated by the pixel
/// lattice rather than the shape.
inline constexpr double kMinSegmentPixels = 2.0;

/// Largest l whose average segment, pi R^2 / (N_l M_l), still covers at
/// least `min_pixels` pixels.
int resolution_ceiling(double radius, double min_pixels = kMinSegmentPixels);

/// min(precision_level(rho), resolution_ceiling) for an image segmented with
/// the default radius.
int max_level(double rho, const BinaryImage& img);

/// {0, s, 2s, ...} x {0, s, 2s, ...} clipped to the frame.
std::vector<Translation> translation_grid(int width, int height, int stride);

/// Delta at the first level: every shift of 2^omega sectors, crossed with
/// the translation grid when enabled.
std::vector<Candidate> initial_candidates(const SearchConfig& cfg, int width, int height);

/// Candidates of `level` that tune the retained set of the previous level:
/// each shift is rescaled to the finer partition and widened by +-j for
/// j in 0..lambda, modulo N. Translations are carried over unchanged.
/// Duplicates are dropped; the result is ordered by (translation, shift).
std::vector<Candidate> refine(std::span<const Candidate> upsilon_prev, int level,
                              const SearchConfig& cfg);

struct LevelRecord {
  int level = 0;
  int sectors = 0;
  int segments = 0;
  std::vector<Candidate> evaluated;  ///< all of delta, best first
  std::vector<Candidate> retained;   ///< upsilon
  ConvergenceMetrics metrics;
  double abstraction_ms = 0.0;
  double scoring_ms = 0.0;
};

struct ExperimentReport {
  std::string label;
  SearchConfig config;
  int precision_level = 0;
  int resolution_ceiling = 0;
  int final_level = 0;
  double radius = 0.0;
  std::optional<double> ground_truth;
  std::optional<std::uint64_t> seed;
  std::vector<LevelRecord> levels;

  const LevelRecord& last() const { return levels.back(); }
  const LevelRecord* find_level(int level) const;
};

/// Evaluates one level of the search from cached polar samples. Build once
/// per image pair and reuse across levels.
class Registration {
 public:
  Registration(const BinaryImage& a, const BinaryImage& b, SearchConfig cfg);

  const SearchConfig& config() const noexcept { return cfg_; }
  double radius() const noexcept { return radius_; }

  /// Abstracts both shapes at the state's partition, scores every candidate
  /// in state.delta and returns the full record, candidates sorted.
  LevelRecord evaluate(const IterationState& state);

  /// The whole coarse-to-fine loop.
  ExperimentReport run();

 private:
  const PolarSamples& samples_b(Translation t);

  BinaryImage b_;
  SearchConfig cfg_;
  double radius_;
  PolarSamples samples_a_;
  std::map<Translation, PolarSamples> cache_b_;
};

/// Scores `state.delta` for a single level and returns it sorted best first.
std::vector<Candidate> evaluate_level(const BinaryImage& a, const BinaryImage& b,
                                      const IterationState& state, const SearchConfig& cfg);

/// Runs the search: levels omega..max with top-epsilon retention and
/// refinement between levels.
ExperimentReport run(const BinaryImage& a, const BinaryImage& b, const SearchConfig& cfg);

}  // namespace shapereg
