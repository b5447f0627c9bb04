// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "shapereg/abstraction.hpp"
#include "shapereg/harness.hpp"
#include "shapereg/search.hpp"
#include "shapereg/similarity.hpp"
#include "shapereg/stats.hpp"

using namespace shapereg;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(bool ok, int id, const std::string& name, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void exact_grid_recovery() {
  constexpr int kShapes = 10;
  const SearchConfig cfg;
  const int n = partition_size(cfg.omega);
  int hits = 0;
  int pairs = 0;
  double worst_ratio = 0.0;
  double slowest = 0.0;
  for (int s = 1; s <= kShapes; ++s) {
    const BinaryImage a =
        generate_shape({ShapeKind::Composite, 128, 128, 6, static_cast<std::uint64_t>(s)});
    for (int k = 0; k < n; ++k) {
      const auto t0 = Clock::now();
      const BinaryImage b = rotate_raster(a, rotation_set(n)[k]);
      IterationState st;
      st.level = cfg.omega;
      st.sectors = st.segments = n;
      st.delta = initial_candidates(cfg, a.width(), a.height());
      const auto ranked = evaluate_level(a, b, st, cfg);
      slowest = std::max(slowest, seconds_since(t0));
      ++pairs;
      const auto truth = std::find_if(ranked.begin(), ranked.end(),
                                      [k](const Candidate& c) { return c.shift == k; });
      const double min_score = ranked.front().score;
      const double ratio = min_score > 0.0 ? truth->score / min_score : 1.0;
      worst_ratio = std::max(worst_ratio, ratio);
      hits += ranked.front().shift == k && truth->score <= 1.1 * min_score;
    }
  }
  verdict(hits == pairs && slowest < 1.0, 1, "exact-grid recovery",
          fmt("%d/%d top-1, worst score/min %.3f, slowest pair %.3f s", hits, pairs,
              worst_ratio, slowest));
}

void off_grid_convergence() {
  const BinaryImage a = generate_shape({ShapeKind::Bee, 764, 764, 0, 1});
  const BinaryImage b = rotate_raster(a, 234.0);
  const auto t0 = Clock::now();
  const ExperimentReport rep = run(a, b, SearchConfig{});
  const double elapsed = seconds_since(t0);
  const double wm3 = rep.last().metrics.wm3;
  const double best = oracle_rotation(a, b, 1.0).best_angle;
  const double err = std::abs(circular_difference(wm3, 234.0));
  const double err_oracle = std::abs(circular_difference(wm3, best));
  verdict((err <= 2.0 || err_oracle <= 1.0) && elapsed < 10.0, 2, "off-grid convergence",
          fmt("WM3 %.3f at level %d, |WM3-234| %.3f, oracle %.0f |WM3-oracle| %.3f, %.2f s",
              wm3, rep.final_level, err, best, err_oracle, elapsed));
}

void noise_suite() {
  const auto t0 = Clock::now();
  std::vector<ExperimentReport> reps;
  for (const auto& c : default_noise_cases()) reps.push_back(run_case(c, SearchConfig{}).report);
  const double elapsed = seconds_since(t0);
  const int sixth = SearchConfig{}.omega + 5;
  bool ok = elapsed < 60.0;
  std::string detail;
  for (const auto& r : reps) {
    const LevelRecord* l = r.find_level(sixth);
    const double v = l ? l->metrics.wv3 : INFINITY;
    ok = ok && v <= 2.0;
    detail += fmt("%s first WV3 %.1f level-%d WV3 %.3f WM3 %.2f; ", r.label.c_str(),
                  r.levels.front().metrics.wv3, sixth, v, r.last().metrics.wm3);
  }
  const double t1 = reps.front().levels.front().metrics.wv3;
  const double t4 = reps.back().levels.front().metrics.wv3;
  ok = ok && t4 > t1;
  detail += fmt("T4 first > T1 first: %s, %.1f s", t4 > t1 ? "yes" : "no", elapsed);
  verdict(ok, 3, "noise suite", detail);
}

void iteration_bound() {
  const BinaryImage a = generate_shape({ShapeKind::Composite, 256, 256, 6, 3});
  const BinaryImage b = rotate_raster(a, 101.0);
  bool ok = true;
  std::string detail;
  const double rhos[] = {45.0, 10.0, 1.0};
  const int bounds[] = {3, 6, 9};
  for (int i = 0; i < 3; ++i) {
    for (bool cap : {true, false}) {
      SearchConfig cfg;
      cfg.rho = rhos[i];
      cfg.resolution_cap = cap;
      const auto rep = run(a, b, cfg);
      const int count = static_cast<int>(rep.levels.size());
      ok = ok && count <= bounds[i] && rep.final_level <= bounds[i] &&
           precision_level(rhos[i]) == bounds[i];
      detail += fmt("rho %g cap %s: %d levels (last %d) <= %d; ", rhos[i], cap ? "on" : "off",
                    count, rep.final_level, bounds[i]);
    }
  }
  verdict(ok, 4, "iteration bound", detail);
}

void resolution_independence() {
  constexpr int kLevel = 7;
  constexpr int kReps = 9;
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed : {3u, 11u}) {
    double t[2];
    int dims[2][2];
    int k = 0;
    for (int size : {100, 1000}) {
      const BinaryImage a = generate_shape({ShapeKind::Composite, size, size, 6, seed});
      const BinaryImage b = rotate_raster(a, 37.0);
      SearchConfig cfg;
      cfg.resolution_cap = false;
      Registration reg(a, b, cfg);
      IterationState st;
      st.level = kLevel;
      st.sectors = st.segments = partition_size(kLevel);
      for (int s = 0; s < st.sectors; ++s) st.delta.push_back({s, {}, 0.0, kLevel, st.sectors});
      double best = INFINITY;
      for (int r = 0; r < kReps; ++r) best = std::min(best, reg.evaluate(st).scoring_ms);
      const auto g = abstract(a, make_params(a, st.sectors, st.segments));
      dims[k][0] = g.sectors();
      dims[k][1] = g.segments();
      t[k++] = best;
    }
    const double diff = std::abs(t[1] - t[0]) / std::min(t[0], t[1]);
    ok = ok && diff < 0.2 && dims[0][0] == dims[1][0] && dims[0][1] == dims[1][1];
    detail += fmt("seed %d: %.3f ms vs %.3f ms (%.1f%%), Gamma %dx%d vs %dx%d; ",
                  static_cast<int>(seed), t[0], t[1], 100.0 * diff, dims[0][0], dims[0][1],
                  dims[1][0], dims[1][1]);
  }
  verdict(ok, 5, "resolution independence", detail);
}

void resolution_saturation() {
  const BinaryImage a = generate_shape({ShapeKind::Bee, 100, 100, 0, 1});
  const BinaryImage b = rotate_raster(a, 234.0);
  SearchConfig cfg;
  cfg.resolution_cap = false;
  const auto rep = run(a, b, cfg);
  const int ceiling = rep.resolution_ceiling;
  const LevelRecord* at_ceiling = rep.find_level(ceiling);
  const auto& last = rep.levels.back();
  const auto& prev = rep.levels[rep.levels.size() - 2];
  const double change = std::abs(circular_difference(last.metrics.wm3, prev.metrics.wm3));
  bool wv3_stops = at_ceiling != nullptr;
  int saturation = -1;
  std::string trace;
  for (const auto& l : rep.levels) {
    trace += fmt("%d:%.2f/%.2f ", l.level, l.metrics.wm3, l.metrics.wv3);
    if (at_ceiling && l.level > ceiling) {
      wv3_stops = wv3_stops && l.metrics.wv3 >= at_ceiling->metrics.wv3;
      const LevelRecord* before = rep.find_level(l.level - 1);
      if (saturation < 0 && l.metrics.wv3 >= before->metrics.wv3) saturation = l.level;
    }
  }
  verdict(change < cfg.rho && wv3_stops && prev.level > ceiling, 6, "resolution saturation",
          fmt("ceiling %d, saturation level %d, |dWM3| last two levels %.3f < %g, "
              "level:WM3/WV3 %s",
              ceiling, saturation, change, cfg.rho, trace.c_str()));
}

void oracle_equivalence() {
  constexpr int kCases = 20;
  Rng rng(99);
  int agree = 0;
  bool failures_symmetric = true;
  for (int i = 0; i < kCases; ++i) {
    const BinaryImage a = generate_shape(
        {ShapeKind::Composite, 64, 64, 6, 1000 + static_cast<std::uint64_t>(i)});
    const double theta = rng.uniform(0.0, 360.0);
    const BinaryImage b = rotate_raster(a, theta);
    const auto rep = run(a, b, SearchConfig{});
    const auto orc = oracle_rotation(a, b, 1.0);
    // self-symmetry: best agreement more than 20 degrees away from the peak
    double peak = 0.0;
    double off_peak = 0.0;
    for (const auto& e : orc.table) {
      const double d = std::abs(circular_difference(e.angle, orc.best_angle));
      if (d == 0.0) peak = static_cast<double>(e.agreement);
      if (d > 20.0) off_peak = std::max(off_peak, static_cast<double>(e.agreement));
    }
    const double symmetry = off_peak / peak;
    const auto& l = rep.last();
    const double err = std::abs(circular_difference(l.metrics.wm3, orc.best_angle));
    const bool ok = err <= 2.0;
    agree += ok;
    if (!ok && symmetry < 0.95) failures_symmetric = false;
    std::printf("  case %2d theta %6.2f oracle %5.1f WM3 %7.2f err %5.2f level %d symmetry %.3f "
                "top3",
                i, theta, orc.best_angle, l.metrics.wm3, err, rep.final_level, symmetry);
    for (std::size_t k = 0; k < std::min<std::size_t>(3, l.retained.size()); ++k) {
      std::printf(" %.2f/%.4f", l.retained[k].angle(), l.retained[k].score);
    }
    std::printf("%s\n", ok ? "" : "  <- miss");
  }
  verdict(agree >= 18 && failures_symmetric, 7, "oracle equivalence",
          fmt("%d/%d within 2 deg of the 1-deg oracle (need 18), misses near-symmetric "
              "(ratio >= 0.95): %s",
              agree, kCases, failures_symmetric ? "yes" : "no"));
}

void formula_units() {
  const double j21 = cell_score(2.0, 1.0);
  const bool j_ok = std::abs(j21 - 1.0 / 3.0) < 1e-12 &&
                    std::round(j21 * 1000.0) / 1000.0 == 0.333 && cell_score(5.0, 5.0) == 0.0 &&
                    cell_score(0.0, 4.0) == 1.0;
  const double w = ring_weight(1, 1);
  const bool w_ok = std::abs(w - std::log(2.0) / std::log(3.0)) < 1e-12;
  SearchConfig cfg;
  cfg.omega = 3;
  cfg.lambda = 1;
  const std::vector<Candidate> upsilon{{2, {}, 0.0, 3, 8}};
  std::vector<double> angles;
  for (const auto& c : refine(upsilon, 4, cfg)) angles.push_back(c.angle());
  std::sort(angles.begin(), angles.end());
  const bool d_ok = angles == std::vector<double>{67.5, 90.0, 112.5};
  std::string delta;
  for (double a : angles) delta += fmt("%g ", a);
  verdict(j_ok && w_ok && d_ok, 8, "formula unit suite",
          fmt("j(2,1)=%.6f j(5,5)=%g j(0,4)=%g, ring weight d=1 %.6f, Delta_4 { %s}", j21,
              cell_score(5.0, 5.0), cell_score(0.0, 4.0), w, delta.c_str()));
}

}  // namespace

int main() {
  exact_grid_recovery();
  off_grid_convergence();
  noise_suite();
  iteration_bound();
  resolution_independence();
  resolution_saturation();
  oracle_equivalence();
  formula_units();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
