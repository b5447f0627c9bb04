#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "shapereg/abstraction.hpp"
#include "shapereg/harness.hpp"
#include "shapereg/search.hpp"

namespace shapereg {

using Json = nlohmann::ordered_json;

Json to_json(const SearchConfig& cfg);

/// Reads {omega, epsilon, lambda, rho, neighborhood_depth,
/// translation: {enabled, stride}, resolution_cap} on top of `base`. Missing
/// keys keep the base value. Throws ConfigError on unknown keys, wrong types
/// or values that fail SearchConfig::validate.
SearchConfig search_config_from_json(const Json& j, SearchConfig base = {});

/// Matrix plus the segmentation parameters that produced it.
Json to_json(const AbstractionMatrix& g);
/// One row per sector, one column per segment.
std::string to_csv(const AbstractionMatrix& g);

Json to_json(const Candidate& c);
Json to_json(const ExperimentReport& report);
/// level,sectors,shift,angle,tx,ty,score,retained - every evaluated candidate.
std::string scores_csv(const ExperimentReport& report);

Json to_json(const OracleResult& result);

Json to_json(const ExperimentCase& c);
/// Missing fields take the defaults of ExperimentCase and ShapeSpec.
ExperimentCase experiment_case_from_json(const Json& j);

/// Suite files are either a bare array of cases or an object with "cases"
/// and an optional "search" config.
struct SuiteFile {
  std::vector<ExperimentCase> cases;
  std::optional<Json> search;
};
SuiteFile suite_file_from_json(const Json& j);

/// Writes report.json and scores.csv into `dir`, creating it if needed.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace shapereg
