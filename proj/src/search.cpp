#include "shapereg/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "shapereg/error.hpp"

namespace shapereg {

namespace {

// 2^30 sectors is far beyond any image; it only guards the shift arithmetic.
constexpr int kMaxLevel = 30;

int wrap(long long value, int modulus) {
  const long long r = value % modulus;
  return static_cast<int>(r < 0 ? r + modulus : r);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

bool ranks_before(const Candidate& lhs, const Candidate& rhs) noexcept {
  if (lhs.score != rhs.score) return lhs.score < rhs.score;
  if (lhs.shift != rhs.shift) return lhs.shift < rhs.shift;
  if (lhs.translation.norm2() != rhs.translation.norm2()) {
    return lhs.translation.norm2() < rhs.translation.norm2();
  }
  return lhs.translation < rhs.translation;
}

void SearchConfig::validate() const {
  if (omega < 1 || omega > kMaxLevel) throw ConfigError("omega must be in 1.." + std::to_string(kMaxLevel));
  if (epsilon < 1) throw ConfigError("epsilon must be >= 1");
  if (lambda < 0) throw ConfigError("lambda must be >= 0");
  if (!(rho > 0.0 && rho <= 360.0)) throw ConfigError("rho must be in (0, 360]");
  if (translation_stride < 1) throw ConfigError("translation stride must be >= 1");
  const int depth = similarity.neighborhood_depth;
  if (depth < 0) throw ConfigError("neighbourhood depth must be >= 0");
  if (depth > 0 && depth >= partition_size(omega)) {
    throw ConfigError("neighbourhood depth must be below 2^omega");
  }
}

int partition_size(int level) {
  if (level < 0 || level > kMaxLevel) throw ContractError("level out of range");
  return 1 << level;
}

std::vector<double> rotation_set(int sectors) {
  if (sectors < 1) throw ContractError("rotation set needs at least one sector");
  std::vector<double> angles(static_cast<std::size_t>(sectors));
  for (int i = 0; i < sectors; ++i) angles[static_cast<std::size_t>(i)] = 360.0 * i / sectors;
  return angles;
}

AbstractionMatrix circular_shift(const AbstractionMatrix& g, int k) {
  const int sectors = g.sectors();
  const int segments = g.segments();
  std::vector<double> values(g.values().size());
  for (int n = 0; n < sectors; ++n) {
    const double* src = g.row(wrap(static_cast<long long>(n) - k, sectors));
    std::copy(src, src + segments, values.begin() + static_cast<std::ptrdiff_t>(n) * segments);
  }
  return AbstractionMatrix(sectors, segments, std::move(values), g.params());
}

int precision_level(double rho) {
  if (!(rho > 0.0 && rho <= 360.0)) throw ContractError("rho must be in (0, 360]");
  int level = 0;
  while (level < kMaxLevel && 360.0 / static_cast<double>(1LL << level) > rho) ++level;
  return level;
}

int resolution_ceiling(double radius, double min_pixels) {
  if (!(radius > 0.0)) throw ContractError("radius must be positive");
  if (!(min_pixels > 0.0)) throw ContractError("pixels per segment must be positive");
  const double disc = std::numbers::pi * radius * radius;
  int level = 0;
  while (level < kMaxLevel) {
    const double cells = std::ldexp(1.0, 2 * (level + 1));
    if (disc / cells < min_pixels) break;
    ++level;
  }
  return level;
}

int max_level(double rho, const BinaryImage& img) {
  return std::min(precision_level(rho),
                  resolution_ceiling(default_radius(img.width(), img.height())));
}

std::vector<Translation> translation_grid(int width, int height, int stride) {
  if (stride < 1) throw ContractError("translation stride must be >= 1");
  std::vector<Translation> grid;
  for (int ty = 0; ty < height; ty += stride) {
    for (int tx = 0; tx < width; tx += stride) grid.push_back({tx, ty});
  }
  return grid;
}

std::vector<Candidate> initial_candidates(const SearchConfig& cfg, int width, int height) {
  const int sectors = partition_size(cfg.omega);
  const std::vector<Translation> translations =
      cfg.translation_enabled ? translation_grid(width, height, cfg.translation_stride)
                              : std::vector<Translation>{Translation{}};
  std::vector<Candidate> delta;
  delta.reserve(translations.size() * static_cast<std::size_t>(sectors));
  for (const Translation& t : translations) {
    for (int k = 0; k < sectors; ++k) delta.push_back({k, t, 0.0, cfg.omega, sectors});
  }
  return delta;
}

std::vector<Candidate> refine(std::span<const Candidate> upsilon_prev, int level,
                              const SearchConfig& cfg) {
  if (upsilon_prev.empty()) throw ContractError("cannot refine an empty candidate set");
  const int sectors = partition_size(level);
  std::map<std::pair<Translation, int>, Candidate> unique;
  for (const Candidate& parent : upsilon_prev) {
    if (parent.sectors < 1 || sectors % parent.sectors != 0) {
      throw ContractError("refinement must move to a finer partition");
    }
    const long long base = static_cast<long long>(parent.shift) * (sectors / parent.sectors);
    for (int j = 0; j <= cfg.lambda; ++j) {
      for (long long s : {base - j, base + j}) {
        const int shift = wrap(s, sectors);
        unique.try_emplace({parent.translation, shift},
                           Candidate{shift, parent.translation, 0.0, level, sectors});
      }
    }
  }
  std::vector<Candidate> delta;
  delta.reserve(unique.size());
  for (const auto& entry : unique) delta.push_back(entry.second);
  return delta;
}

const LevelRecord* ExperimentReport::find_level(int level) const {
  for (const LevelRecord& rec : levels) {
    if (rec.level == level) return &rec;
  }
  return nullptr;
}

Registration::Registration(const BinaryImage& a, const BinaryImage& b, SearchConfig cfg)
    : b_(b),
      cfg_(cfg),
      radius_(std::max(default_radius(a.width(), a.height()),
                       default_radius(b.width(), b.height()))),
      samples_a_(a, a.center(), radius_) {
  cfg_.validate();
}

const PolarSamples& Registration::samples_b(Translation t) {
  auto it = cache_b_.find(t);
  if (it == cache_b_.end()) {
    const Point2 center{b_.center().x + t.tx, b_.center().y + t.ty};
    it = cache_b_.emplace(t, PolarSamples(b_, center, radius_)).first;
  }
  return it->second;
}

LevelRecord Registration::evaluate(const IterationState& state) {
  if (state.delta.empty()) throw ContractError("empty candidate set");
  LevelRecord rec;
  rec.level = state.level;
  rec.sectors = state.sectors;
  rec.segments = state.segments;

  // Group candidates by translation so each translated abstraction is built
  // once per level.
  std::map<Translation, std::size_t> slot;
  std::vector<Translation> translations;
  for (const Candidate& c : state.delta) {
    if (slot.try_emplace(c.translation, translations.size()).second) {
      translations.push_back(c.translation);
    }
  }

  auto start = std::chrono::steady_clock::now();
  const AbstractionMatrix gamma_a = samples_a_.abstract(state.sectors, state.segments);
  std::vector<AbstractionMatrix> gamma_b;
  gamma_b.reserve(translations.size());
  for (const Translation& t : translations) {
    gamma_b.push_back(samples_b(t).abstract(state.sectors, state.segments));
  }
  rec.abstraction_ms = elapsed_ms(start);

  start = std::chrono::steady_clock::now();
  rec.evaluated = state.delta;
  for (Candidate& c : rec.evaluated) {
    if (c.shift < 0 || c.shift >= state.sectors) throw ContractError("shift outside 0..N-1");
    c.score = matrix_score_shifted(gamma_a, gamma_b[slot.at(c.translation)], c.shift,
                                   cfg_.similarity);
    c.level = state.level;
    c.sectors = state.sectors;
  }
  rec.scoring_ms = elapsed_ms(start);

  std::sort(rec.evaluated.begin(), rec.evaluated.end(), ranks_before);
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(cfg_.epsilon), rec.evaluated.size());
  rec.retained.assign(rec.evaluated.begin(), rec.evaluated.begin() + static_cast<std::ptrdiff_t>(keep));

  std::vector<AngleScore> ranked;
  ranked.reserve(rec.retained.size());
  for (const Candidate& c : rec.retained) ranked.push_back({c.angle(), c.score});
  rec.metrics = convergence_metrics(ranked, state.level);
  return rec;
}

ExperimentReport Registration::run() {
  ExperimentReport report;
  report.config = cfg_;
  report.radius = radius_;
  report.precision_level = precision_level(cfg_.rho);
  report.resolution_ceiling = resolution_ceiling(radius_);
  int last = cfg_.resolution_cap ? std::min(report.precision_level, report.resolution_ceiling)
                                 : report.precision_level;
  last = std::max(last, cfg_.omega);
  report.final_level = last;

  IterationState state;
  state.level = cfg_.omega;
  state.sectors = state.segments = partition_size(cfg_.omega);
  state.delta = initial_candidates(cfg_, b_.width(), b_.height());
  while (true) {
    LevelRecord rec = evaluate(state);
    state.upsilon = rec.retained;
    report.levels.push_back(std::move(rec));
    if (state.level >= last) break;
    ++state.level;
    state.sectors = state.segments = partition_size(state.level);
    state.delta = refine(state.upsilon, state.level, cfg_);
  }
  return report;
}

std::vector<Candidate> evaluate_level(const BinaryImage& a, const BinaryImage& b,
                                      const IterationState& state, const SearchConfig& cfg) {
  return Registration(a, b, cfg).evaluate(state).evaluated;
}

ExperimentReport run(const BinaryImage& a, const BinaryImage& b, const SearchConfig& cfg) {
  return Registration(a, b, cfg).run();
}

}  // namespace shapereg
