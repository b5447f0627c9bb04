// shapereg: rotation registration of binary shapes from the command line.
#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "shapereg/abstraction.hpp"
#include "shapereg/error.hpp"
#include "shapereg/harness.hpp"
#include "shapereg/image_io.hpp"
#include "shapereg/report.hpp"
#include "shapereg/search.hpp"
#include "shapereg/stats.hpp"

using namespace shapereg;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;
constexpr int kExitCaseFailed = 4;

struct SearchFlags {
  std::string config_path;
  std::optional<int> omega;
  std::optional<int> epsilon;
  std::optional<int> lambda;
  std::optional<double> rho;
  std::optional<int> depth;
  std::optional<int> stride;
  bool translation = false;
  bool no_cap = false;
};

void add_search_flags(CLI::App* cmd, SearchFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON search config; flags given here win");
  cmd->add_option("--omega", f.omega, "first level, N = M = 2^omega (default 3)");
  cmd->add_option("--epsilon", f.epsilon, "candidates kept per level (default 10)");
  cmd->add_option("--lambda", f.lambda, "refinement half-width in shifts (default 10)");
  cmd->add_option("--rho", f.rho, "target precision in degrees (default 1)");
  cmd->add_option("--depth", f.depth, "neighbourhood depth d (default 0)");
  cmd->add_flag("--translation", f.translation, "also search translations");
  cmd->add_option("--stride", f.stride, "translation grid stride in pixels (default 8)");
  cmd->add_flag("--no-resolution-cap", f.no_cap, "keep refining past the resolution ceiling");
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

SearchConfig resolve(const SearchFlags& f, const std::optional<Json>& embedded = std::nullopt) {
  SearchConfig cfg;
  if (embedded) cfg = search_config_from_json(*embedded, cfg);
  if (!f.config_path.empty()) cfg = search_config_from_json(read_json(f.config_path), cfg);
  if (f.omega) cfg.omega = *f.omega;
  if (f.epsilon) cfg.epsilon = *f.epsilon;
  if (f.lambda) cfg.lambda = *f.lambda;
  if (f.rho) cfg.rho = *f.rho;
  if (f.depth) cfg.similarity.neighborhood_depth = *f.depth;
  if (f.stride) cfg.translation_stride = *f.stride;
  if (f.translation) cfg.translation_enabled = true;
  if (f.no_cap) cfg.resolution_cap = false;
  cfg.validate();
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  out << text;
  if (!out) throw IoError(path, "write failed");
}

void print_levels(const ExperimentReport& rep) {
  std::printf("level  sectors  evaluated      best        WM3         WV3\n");
  for (const LevelRecord& l : rep.levels) {
    std::printf("%5d  %7d  %9zu  %8.3f  %9.3f  %10.3f\n", l.level, l.sectors,
                l.evaluated.size(), l.retained.front().angle(), l.metrics.wm3, l.metrics.wv3);
  }
}

void print_top(const LevelRecord& l, bool translation) {
  std::printf("\nrank  shift      angle%s        score\n", translation ? "     tx     ty" : "");
  for (std::size_t i = 0; i < l.retained.size(); ++i) {
    const Candidate& c = l.retained[i];
    std::printf("%4zu  %5d  %9.4f", i + 1, c.shift, c.angle());
    if (translation) std::printf("  %5d  %5d", c.translation.tx, c.translation.ty);
    std::printf("  %11.5f\n", c.score);
  }
}

// ---- estimate ----

struct EstimateArgs {
  std::string a;
  std::string b;
  SearchFlags search;
  bool json = false;
  std::string out;
};

int cmd_estimate(const EstimateArgs& args) {
  const SearchConfig cfg = resolve(args.search);
  const BinaryImage a = load_binary(args.a);
  const BinaryImage b = load_binary(args.b);
  ExperimentReport rep = run(a, b, cfg);
  rep.label = args.b;
  if (!args.out.empty()) write_report(rep, args.out);
  if (args.json) {
    std::cout << to_json(rep).dump(2) << '\n';
    return 0;
  }
  print_levels(rep);
  const LevelRecord& last = rep.last();
  std::printf("\nWM3 %.4f deg   WV3 %.4f deg^2   (level %d of %d, ceiling %d)\n", last.metrics.wm3,
              last.metrics.wv3, last.level, rep.precision_level, rep.resolution_ceiling);
  print_top(last, cfg.translation_enabled);
  return 0;
}

// ---- abstract ----

struct AbstractArgs {
  std::string image;
  int sectors = 8;
  int segments = 8;
  std::optional<double> radius;
  bool raw = false;
  bool json = false;
  std::string out;
};

int cmd_abstract(const AbstractArgs& args) {
  const BinaryImage img = load_binary(args.image);
  SegmentationParams params = make_params(img, args.sectors, args.segments);
  if (args.radius) params.radius = *args.radius;
  params.validate();
  const AbstractionMatrix g = args.raw ? raw_counts(img, params) : abstract(img, params);
  std::string text;
  if (args.json) {
    Json j = to_json(g);
    j["normalization"] = args.raw ? "none" : "unit-mean";
    text = j.dump(2) + "\n";
  } else {
    std::ostringstream head;
    head.precision(17);
    head << "# sectors=" << params.sectors << " segments=" << params.segments << " center="
         << params.center.x << "," << params.center.y << " radius=" << params.radius
         << " normalization=" << (args.raw ? "none" : "unit-mean") << '\n';
    text = head.str() + to_csv(g);
  }
  if (args.out.empty()) {
    std::cout << text;
  } else {
    write_file(args.out, text);
  }
  return 0;
}

// ---- generate / rotate / noise ----

struct GenerateArgs {
  std::string kind = "composite";
  int width = 128;
  int height = 128;
  int count = 6;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_generate(const GenerateArgs& args) {
  ShapeKind kind;
  try {
    kind = shape_kind_from_string(args.kind);
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  const BinaryImage img = generate_shape({kind, args.width, args.height, args.count, args.seed});
  save_binary(img, args.out);
  std::printf("%s: %dx%d, %zu pixels set\n", args.out.c_str(), img.width(), img.height(),
              img.count());
  return 0;
}

struct RotateArgs {
  std::string in;
  double angle = 0.0;
  std::string out;
};

int cmd_rotate(const RotateArgs& args) {
  const BinaryImage img = load_binary(args.in);
  save_binary(rotate_raster(img, args.angle), args.out);
  return 0;
}

struct NoiseArgs {
  std::string in;
  std::uint64_t draws = 0;
  std::uint64_t seed = 1;
  std::vector<int> region;
  std::string out;
};

int cmd_noise(const NoiseArgs& args) {
  const BinaryImage img = load_binary(args.in);
  Rect rect{0, 0, img.width(), img.height()};
  if (!args.region.empty()) {
    if (args.region.size() != 4) throw ConfigError("--region takes x,y,width,height");
    rect = {args.region[0], args.region[1], args.region[2], args.region[3]};
  }
  try {
    save_binary(add_noise(img, {rect, args.draws, args.seed}), args.out);
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  return 0;
}

// ---- oracle ----

struct OracleArgs {
  std::string a;
  std::string b;
  double step = 1.0;
  bool json = false;
};

int cmd_oracle(const OracleArgs& args) {
  const BinaryImage a = load_binary(args.a);
  const BinaryImage b = load_binary(args.b);
  if (!(args.step > 0.0)) throw ConfigError("--step must be positive");
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ConfigError("oracle needs images of equal size");
  }
  const OracleResult res = oracle_rotation(a, b, args.step);
  if (args.json) {
    std::cout << to_json(res).dump(2) << '\n';
  } else {
    const auto best = std::max_element(res.table.begin(), res.table.end(),
                                       [](const auto& l, const auto& r) {
                                         return l.agreement < r.agreement;
                                       });
    std::printf("best angle %.4f deg, %zu of %zu pixels agree\n", res.best_angle,
                best->agreement, static_cast<std::size_t>(a.width()) * a.height());
  }
  return 0;
}

// ---- suite ----

struct SuiteArgs {
  std::string cases;
  std::string out = "suite-out";
  std::uint64_t seed = 2024;
  unsigned jobs = 1;
  SearchFlags search;
  bool json = false;
};

struct CaseResult {
  std::optional<ExperimentReport> report;
  std::string error;
};

int cmd_suite(const SuiteArgs& args) {
  SuiteFile suite;
  if (args.cases.empty()) {
    suite.cases = default_noise_cases(args.seed);
  } else {
    suite = suite_file_from_json(read_json(args.cases));
  }
  const SearchConfig cfg = resolve(args.search, suite.search);
  if (suite.cases.empty()) {
    if (args.json) std::cout << "[]\n";
    return 0;
  }

  std::vector<CaseResult> results(suite.cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < suite.cases.size(); i = next++) {
      const ExperimentCase& c = suite.cases[i];
      try {
        CaseOutcome outcome = run_case(c, cfg);
        write_report(outcome.report, std::filesystem::path(args.out) / c.name);
        results[i].report = std::move(outcome.report);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  const unsigned jobs =
      std::clamp<unsigned>(args.jobs, 1, static_cast<unsigned>(suite.cases.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }

  Json summary = Json::array();
  int failed = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const ExperimentCase& c = suite.cases[i];
    Json row = to_json(c);
    if (results[i].report) {
      const ExperimentReport& rep = *results[i].report;
      row["status"] = "ok";
      row["final_level"] = rep.final_level;
      row["final_wm3"] = rep.last().metrics.wm3;
      row["final_wv3"] = rep.last().metrics.wv3;
      row["first_wv3"] = rep.levels.front().metrics.wv3;
      row["error_deg"] = circular_difference(rep.last().metrics.wm3, c.theta);
    } else {
      ++failed;
      row["status"] = "failed";
      row["error"] = results[i].error;
    }
    summary.push_back(std::move(row));
  }
  std::filesystem::create_directories(args.out);
  Json file;
  file["config"] = to_json(cfg);
  file["cases"] = summary;
  write_file((std::filesystem::path(args.out) / "summary.json").string(), file.dump(2) + "\n");

  if (args.json) {
    std::cout << summary.dump(2) << '\n';
  } else {
    std::printf("case        theta     draws  level        WM3     error      first WV3     final WV3\n");
    for (std::size_t i = 0; i < results.size(); ++i) {
      const ExperimentCase& c = suite.cases[i];
      if (!results[i].report) {
        std::printf("%-10s  FAILED: %s\n", c.name.c_str(), results[i].error.c_str());
        continue;
      }
      const ExperimentReport& rep = *results[i].report;
      std::printf("%-10s  %5.1f  %8llu  %5d  %9.3f  %8.3f  %13.3f  %12.3f\n", c.name.c_str(),
                  c.theta, static_cast<unsigned long long>(c.noise_draws), rep.final_level,
                  rep.last().metrics.wm3,
                  circular_difference(rep.last().metrics.wm3, c.theta),
                  rep.levels.front().metrics.wv3, rep.last().metrics.wv3);
    }
    std::printf("reports in %s\n", args.out.c_str());
  }
  return failed ? kExitCaseFailed : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotation registration of binary shapes"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "estimate the rotation mapping A onto B");
  estimate->add_option("a", est.a, "shape A")->required();
  estimate->add_option("b", est.b, "shape B")->required();
  add_search_flags(estimate, est.search);
  estimate->add_flag("--json", est.json, "print the full report as JSON");
  estimate->add_option("--out", est.out, "write report.json and scores.csv here");

  AbstractArgs abs;
  auto* abstract_cmd = app.add_subcommand("abstract", "print the abstraction matrix of an image");
  abstract_cmd->add_option("image", abs.image, "input image")->required();
  abstract_cmd->add_option("-N,--sectors", abs.sectors, "sector count");
  abstract_cmd->add_option("-M,--segments", abs.segments, "segment count");
  abstract_cmd->add_option("--radius", abs.radius, "outer radius in pixels (default half diagonal)");
  abstract_cmd->add_flag("--raw", abs.raw, "pixel counts without normalization");
  abstract_cmd->add_flag("--json", abs.json, "JSON instead of CSV");
  abstract_cmd->add_option("--out", abs.out, "output file (default stdout)");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "draw a synthetic shape");
  generate->add_option("--kind", gen.kind, "lines, circles, noise, composite or bee");
  generate->add_option("--width", gen.width, "frame width");
  generate->add_option("--height", gen.height, "frame height");
  generate->add_option("--count", gen.count, "primitives per family");
  generate->add_option("--seed", gen.seed, "random seed");
  generate->add_option("-o,--out", gen.out, "output .pbm or .png")->required();

  RotateArgs rot;
  auto* rotate = app.add_subcommand("rotate", "rotate an image about its center");
  rotate->add_option("in", rot.in, "input image")->required();
  rotate->add_option("--angle", rot.angle, "degrees, counter-clockwise")->required();
  rotate->add_option("-o,--out", rot.out, "output .pbm or .png")->required();

  NoiseArgs noi;
  auto* noise = app.add_subcommand("noise", "set random pixels inside a region");
  noise->add_option("in", noi.in, "input image")->required();
  noise->add_option("--draws", noi.draws, "pixel selections, with replacement")->required();
  noise->add_option("--seed", noi.seed, "random seed");
  noise->add_option("--region", noi.region, "x,y,width,height (default whole frame)")
      ->delimiter(',');
  noise->add_option("-o,--out", noi.out, "output .pbm or .png")->required();

  OracleArgs ora;
  auto* oracle = app.add_subcommand("oracle", "brute-force pixel overlap sweep");
  oracle->add_option("a", ora.a, "shape A")->required();
  oracle->add_option("b", ora.b, "shape B")->required();
  oracle->add_option("--step", ora.step, "angle step in degrees");
  oracle->add_flag("--json", ora.json, "print the overlap table as JSON");

  SuiteArgs sui;
  auto* suite = app.add_subcommand("suite", "run a list of generate/rotate/noise/estimate cases");
  suite->add_option("cases", sui.cases, "JSON case list (default: the four noise tests)");
  suite->add_option("--out", sui.out, "report directory");
  suite->add_option("--seed", sui.seed, "noise seed for the default cases");
  suite->add_option("--jobs", sui.jobs, "cases run in parallel");
  add_search_flags(suite, sui.search);
  suite->add_flag("--json", sui.json, "print the summary as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ConversionError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const CLI::ValidationError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitUsage;
  }

  try {
    if (*estimate) return cmd_estimate(est);
    if (*abstract_cmd) return cmd_abstract(abs);
    if (*generate) return cmd_generate(gen);
    if (*rotate) return cmd_rotate(rot);
    if (*noise) return cmd_noise(noi);
    if (*oracle) return cmd_oracle(ora);
    if (*suite) return cmd_suite(sui);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ContractError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitUsage;
}
