#include "shapereg/report.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "shapereg/error.hpp"

namespace shapereg {

namespace {

template <typename T>
T field(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  bool ok = v.is_number();
  if constexpr (std::is_same_v<T, bool>) ok = v.is_boolean();
  else if constexpr (std::is_same_v<T, std::string>) ok = v.is_string();
  else if constexpr (std::is_unsigned_v<T>) ok = v.is_number_unsigned();
  else if constexpr (std::is_integral_v<T>) ok = v.is_number_integer();
  if (!ok) throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  try {
    return v.get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw ConfigError("unknown config key '" + item.key() + "' in " + where);
    }
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace

Json to_json(const SearchConfig& cfg) {
  return {{"omega", cfg.omega},
          {"epsilon", cfg.epsilon},
          {"lambda", cfg.lambda},
          {"rho", cfg.rho},
          {"neighborhood_depth", cfg.similarity.neighborhood_depth},
          {"translation", {{"enabled", cfg.translation_enabled}, {"stride", cfg.translation_stride}}},
          {"resolution_cap", cfg.resolution_cap}};
}

SearchConfig search_config_from_json(const Json& j, SearchConfig base) {
  if (!j.is_object()) throw ConfigError("search config must be a JSON object");
  reject_unknown(j,
                 {"omega", "epsilon", "lambda", "rho", "neighborhood_depth", "translation",
                  "resolution_cap"},
                 "search config");
  SearchConfig cfg = base;
  cfg.omega = field(j, "omega", cfg.omega);
  cfg.epsilon = field(j, "epsilon", cfg.epsilon);
  cfg.lambda = field(j, "lambda", cfg.lambda);
  cfg.rho = field(j, "rho", cfg.rho);
  cfg.similarity.neighborhood_depth =
      field(j, "neighborhood_depth", cfg.similarity.neighborhood_depth);
  cfg.resolution_cap = field(j, "resolution_cap", cfg.resolution_cap);
  if (j.contains("translation")) {
    const Json& t = j.at("translation");
    if (!t.is_object()) throw ConfigError("'translation' must be an object");
    reject_unknown(t, {"enabled", "stride"}, "translation");
    cfg.translation_enabled = field(t, "enabled", cfg.translation_enabled);
    cfg.translation_stride = field(t, "stride", cfg.translation_stride);
  }
  cfg.validate();
  return cfg;
}

Json to_json(const AbstractionMatrix& g) {
  Json rows = Json::array();
  for (int n = 0; n < g.sectors(); ++n) {
    rows.push_back(Json(std::vector<double>(g.row(n), g.row(n) + g.segments())));
  }
  const SegmentationParams& p = g.params();
  return {{"sectors", g.sectors()},
          {"segments", g.segments()},
          {"center", {p.center.x, p.center.y}},
          {"radius", p.radius},
          {"normalization", "unit-mean"},
          {"values", rows}};
}

std::string to_csv(const AbstractionMatrix& g) {
  std::ostringstream out;
  out.precision(17);
  for (int n = 0; n < g.sectors(); ++n) {
    for (int m = 0; m < g.segments(); ++m) {
      if (m) out << ',';
      out << g(n, m);
    }
    out << '\n';
  }
  return out.str();
}

Json to_json(const Candidate& c) {
  return {{"shift", c.shift},
          {"angle", c.angle()},
          {"tx", c.translation.tx},
          {"ty", c.translation.ty},
          {"score", c.score}};
}

Json to_json(const ExperimentReport& report) {
  Json levels = Json::array();
  for (const LevelRecord& rec : report.levels) {
    Json evaluated = Json::array();
    for (const Candidate& c : rec.evaluated) evaluated.push_back(to_json(c));
    Json retained = Json::array();
    for (const Candidate& c : rec.retained) retained.push_back(to_json(c));
    Json top3 = Json::array();
    for (const AngleScore& a : rec.metrics.top3) {
      top3.push_back({{"angle", a.angle}, {"score", a.score}});
    }
    levels.push_back({{"level", rec.level},
                      {"sectors", rec.sectors},
                      {"segments", rec.segments},
                      {"wm3", rec.metrics.wm3},
                      {"wv3", rec.metrics.wv3},
                      {"top3", top3},
                      {"retained", retained},
                      {"evaluated", evaluated},
                      {"abstraction_ms", rec.abstraction_ms},
                      {"scoring_ms", rec.scoring_ms}});
  }
  Json out = {{"label", report.label},
              {"config", to_json(report.config)},
              {"radius", report.radius},
              {"precision_level", report.precision_level},
              {"resolution_ceiling", report.resolution_ceiling},
              {"final_level", report.final_level},
              {"ground_truth", report.ground_truth ? Json(*report.ground_truth) : Json()},
              {"seed", report.seed ? Json(*report.seed) : Json()},
              {"metrics_definition",
               {{"weight", "1 / (score + 1e-9)"},
                {"wm3", "weighted circular mean of the top-3 angles"},
                {"wv3",
                 "sum w d^2 / (sum w - sum w^2 / sum w), d = signed circular deviation from wm3"},
                {"score", "sum over cells of |a - b| / (a + b); lower is better"},
                {"normalization", "unit-mean"}}},
              {"levels", levels}};
  if (!report.levels.empty()) {
    Json best = Json::array();
    for (const Candidate& c : report.last().retained) best.push_back(to_json(c));
    out["best"] = best;
    out["final_wm3"] = report.last().metrics.wm3;
    out["final_wv3"] = report.last().metrics.wv3;
  }
  return out;
}

std::string scores_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "level,sectors,shift,angle,tx,ty,score,retained\n";
  for (const LevelRecord& rec : report.levels) {
    for (std::size_t i = 0; i < rec.evaluated.size(); ++i) {
      const Candidate& c = rec.evaluated[i];
      out << rec.level << ',' << rec.sectors << ',' << c.shift << ',' << c.angle() << ','
          << c.translation.tx << ',' << c.translation.ty << ',' << c.score << ','
          << (i < rec.retained.size() ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

Json to_json(const OracleResult& result) {
  Json table = Json::array();
  for (const OracleEntry& e : result.table) {
    table.push_back({{"angle", e.angle}, {"agreement", e.agreement}});
  }
  return {{"best_angle", result.best_angle}, {"table", table}};
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());
  write_text(dir / "report.json", to_json(report).dump(2) + "\n");
  write_text(dir / "scores.csv", scores_csv(report));
}

Json to_json(const ExperimentCase& c) {
  Json j;
  j["name"] = c.name;
  j["shape"] = {{"kind", to_string(c.shape.kind)},
                {"width", c.shape.width},
                {"height", c.shape.height},
                {"count", c.shape.count},
                {"seed", c.shape.seed}};
  j["theta"] = c.theta;
  j["noise_draws"] = c.noise_draws;
  if (c.noise_region) {
    const Rect& r = *c.noise_region;
    j["noise_region"] = {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
  }
  j["noise_seed"] = c.noise_seed;
  return j;
}

ExperimentCase experiment_case_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("suite case must be a JSON object");
  reject_unknown(j, {"name", "shape", "theta", "noise_draws", "noise_region", "noise_seed"},
                 "suite case");
  ExperimentCase c;
  c.name = field(j, "name", std::string{});
  if (c.name.empty()) throw ConfigError("suite case needs a non-empty 'name'");
  if (c.name.find_first_of("/\\") != std::string::npos || c.name == "." || c.name == "..") {
    throw ConfigError("suite case name '" + c.name + "' cannot be used as a directory");
  }
  if (j.contains("shape")) {
    const Json& s = j.at("shape");
    if (!s.is_object()) throw ConfigError("'shape' must be an object");
    reject_unknown(s, {"kind", "width", "height", "count", "seed"}, "shape");
    try {
      c.shape.kind = shape_kind_from_string(field(s, "kind", to_string(c.shape.kind)));
    } catch (const ContractError& e) {
      throw ConfigError(e.what());
    }
    c.shape.width = field(s, "width", c.shape.width);
    c.shape.height = field(s, "height", c.shape.height);
    c.shape.count = field(s, "count", c.shape.count);
    c.shape.seed = field(s, "seed", c.shape.seed);
    if (c.shape.width < 1 || c.shape.height < 1) throw ConfigError("shape size must be positive");
    if (c.shape.count < 0) throw ConfigError("shape count must be >= 0");
  }
  c.theta = field(j, "theta", c.theta);
  if (!std::isfinite(c.theta)) throw ConfigError("'theta' must be finite");
  c.noise_draws = field(j, "noise_draws", c.noise_draws);
  c.noise_seed = field(j, "noise_seed", c.noise_seed);
  if (j.contains("noise_region")) {
    const Json& r = j.at("noise_region");
    if (!r.is_object()) throw ConfigError("'noise_region' must be an object");
    reject_unknown(r, {"x", "y", "width", "height"}, "noise_region");
    Rect rect;
    rect.x = field(r, "x", 0);
    rect.y = field(r, "y", 0);
    rect.width = field(r, "width", 0);
    rect.height = field(r, "height", 0);
    c.noise_region = rect;
  }
  return c;
}

SuiteFile suite_file_from_json(const Json& j) {
  SuiteFile out;
  const Json* cases = &j;
  if (j.is_object()) {
    reject_unknown(j, {"cases", "search"}, "suite file");
    if (!j.contains("cases")) throw ConfigError("suite file needs a 'cases' array");
    cases = &j.at("cases");
    if (j.contains("search")) out.search = j.at("search");
  }
  if (!cases->is_array()) throw ConfigError("suite cases must be a JSON array");
  std::set<std::string> names;
  for (const Json& item : *cases) {
    out.cases.push_back(experiment_case_from_json(item));
    if (!names.insert(out.cases.back().name).second) {
      throw ConfigError("duplicate suite case name '" + out.cases.back().name + "'");
    }
  }
  return out;
}

}  // namespace shapereg
