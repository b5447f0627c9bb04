#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "oracles.hpp"
#include "shapereg/harness.hpp"
#include "shapereg/image_io.hpp"

using namespace shapereg;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result shapereg_cli(const std::string& args) {
  const std::string cmd = std::string(SHAPEREG_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("shapereg_cli_" + std::to_string(getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string put(const BinaryImage& img, const std::string& name) {
  const fs::path p = scratch() / name;
  save_binary(img, p);
  return p.string();
}

std::string put_text(const std::string& text, const std::string& name) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST_CASE("estimate on identical shapes reports zero rotation") {
  const auto a = put(generate_shape({ShapeKind::Composite, 96, 96, 6, 4}), "same.pbm");
  const Result r = shapereg_cli("estimate " + a + " " + a + " --json");
  REQUIRE(r.status == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["final_wm3"].get<double>() == doctest::Approx(0.0));
  CHECK(rep["best"][0]["shift"].get<int>() == 0);
}

TEST_CASE("estimate recovers a quarter turn and honours rho") {
  const BinaryImage img = generate_shape({ShapeKind::Bee, 128, 128, 0, 1});
  const auto a = put(img, "bee.pbm");
  const auto b = put(rotate_raster(img, 90.0), "bee90.png");
  const Result r = shapereg_cli("estimate " + a + " " + b + " --json");
  REQUIRE(r.status == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["final_wm3"].get<double>() == doctest::Approx(90.0).epsilon(1e-3));

  for (const auto& [rho, bound] : {std::pair{"45", 3}, {"10", 6}, {"1", 9}}) {
    const Result q = shapereg_cli("estimate " + a + " " + b + " --json --no-resolution-cap --rho " +
                                  std::string(rho));
    REQUIRE(q.status == 0);
    const json levels = json::parse(q.out)["levels"];
    CHECK(static_cast<int>(levels.size()) <= bound);
    CHECK(levels.back()["level"].get<int>() <= bound);
  }
}

TEST_CASE("estimate writes report files and reports translations") {
  BinaryImage a(40, 40);
  BinaryImage b(40, 40);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 9; ++x) {
      a.set(10 + x, 10 + y, true);
      b.set(20 + x, 10 + y, true);
    }
  }
  const auto pa = put(a, "ta.pbm");
  const auto pb = put(b, "tb.pbm");
  const fs::path out = scratch() / "translated";
  const Result r = shapereg_cli("estimate " + pa + " " + pb +
                                " --translation --stride 10 --out " + out.string());
  REQUIRE(r.status == 0);
  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "scores.csv"));
  const json best = read_json_file(out / "report.json")["best"][0];
  CHECK(best["tx"].get<int>() == 10);
  CHECK(best["ty"].get<int>() == 0);
}

TEST_CASE("abstract matches the brute-force classifier") {
  const BinaryImage bee = generate_shape({ShapeKind::Bee, 150, 110, 0, 1});
  const auto p = put(bee, "abee.pbm");
  const Result r = shapereg_cli("abstract " + p + " -N 8 -M 8 --raw --json");
  REQUIRE(r.status == 0);
  const json g = json::parse(r.out);
  const auto expected = oracle::counts(bee, 8, 8, bee.center(), std::hypot(150.0, 110.0) / 2.0);
  REQUIRE(g["values"].size() == 8);
  for (int n = 0; n < 8; ++n) {
    for (int m = 0; m < 8; ++m) {
      CHECK(g["values"][n][m].get<double>() == expected[static_cast<std::size_t>(n * 8 + m)]);
    }
  }
  CHECK(g["normalization"] == "none");
}

TEST_CASE("abstract degenerate inputs") {
  const auto empty = put(BinaryImage(12, 12), "empty.pbm");
  const Result z = shapereg_cli("abstract " + empty + " -N 4 -M 3 --json");
  REQUIRE(z.status == 0);
  for (const auto& row : json::parse(z.out)["values"]) {
    for (const auto& v : row) CHECK(v.get<double>() == 0.0);
  }

  const auto some = put(generate_shape({ShapeKind::Circles, 30, 30, 3, 2}), "some.pbm");
  const Result one = shapereg_cli("abstract " + some + " -N 1 -M 1");
  REQUIRE(one.status == 0);
  CHECK(one.out.rfind("# sectors=1 segments=1", 0) == 0);
  CHECK(one.out.find("\n1\n") != std::string::npos);
}

TEST_CASE("errors map to exit codes") {
  const auto a = put(generate_shape({ShapeKind::Composite, 32, 32, 3, 1}), "e.pbm");
  CHECK(shapereg_cli("estimate " + a + " " + (scratch() / "missing.pbm").string()).status == 2);
  CHECK(shapereg_cli("estimate " + a + " " + put_text("not an image", "junk.pbm")).status == 2);
  CHECK(shapereg_cli("estimate " + a + " " + a + " --omega 0").status == 3);
  CHECK(shapereg_cli("estimate " + a + " " + a + " --omega x").status == 3);
  const auto bad = put_text(R"({"epsilon": 2.5})", "bad.json");
  CHECK(shapereg_cli("estimate " + a + " " + a + " --config " + bad).status == 3);
  const auto unknown = put_text(R"({"epsilon": 3, "colour": 1})", "unknown.json");
  CHECK(shapereg_cli("estimate " + a + " " + a + " --config " + unknown).status == 3);
  CHECK(shapereg_cli("frobnicate").status == 1);
  CHECK(shapereg_cli("estimate " + a).status == 1);
  CHECK(shapereg_cli("--help").status == 0);
}

TEST_CASE("config file and flags combine with flags winning") {
  const auto a = put(generate_shape({ShapeKind::Composite, 64, 64, 6, 8}), "cf.pbm");
  const auto cfg = put_text(R"({"epsilon": 4, "rho": 45})", "cfg.json");
  const Result r = shapereg_cli("estimate " + a + " " + a + " --json --config " + cfg +
                                " --rho 22.5");
  REQUIRE(r.status == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["config"]["epsilon"].get<int>() == 4);
  CHECK(rep["config"]["rho"].get<double>() == 22.5);
  CHECK(rep["levels"].back()["retained"].size() == 4);
}

TEST_CASE("suite runs cases from a file") {
  const auto empty = put_text("[]", "empty_suite.json");
  CHECK(shapereg_cli("suite " + empty + " --out " + (scratch() / "s0").string()).status == 0);

  const auto cases = put_text(R"({
    "cases": [{"name": "quarter", "shape": {"kind": "bee", "width": 128, "height": 128},
               "theta": 270}],
    "search": {"epsilon": 5}
  })",
                              "one.json");
  const fs::path out = scratch() / "s1";
  const Result r = shapereg_cli("suite " + cases + " --json --out " + out.string());
  REQUIRE(r.status == 0);
  const json rows = json::parse(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0]["status"] == "ok");
  CHECK(rows[0]["final_wm3"].get<double>() == doctest::Approx(270.0).epsilon(1e-3));
  CHECK(fs::exists(out / "quarter" / "report.json"));
  CHECK(read_json_file(out / "summary.json")["config"]["epsilon"].get<int>() == 5);

  const auto failing = put_text(R"([{"name": "off", "shape": {"kind": "bee", "width": 64,
    "height": 64}, "theta": 10, "noise_draws": 5,
    "noise_region": {"x": 60, "y": 60, "width": 30, "height": 30}}])",
                                "fail.json");
  CHECK(shapereg_cli("suite " + failing + " --out " + (scratch() / "s2").string()).status == 4);

  const auto dup = put_text(R"([{"name": "x", "theta": 1}, {"name": "x", "theta": 2}])",
                            "dup.json");
  CHECK(shapereg_cli("suite " + dup + " --out " + (scratch() / "s3").string()).status == 3);
}

TEST_CASE("default suite writes the four noise reports") {
  const fs::path out = scratch() / "default";
  const Result r = shapereg_cli("suite --jobs 4 --json --out " + out.string());
  REQUIRE(r.status == 0);
  const json rows = json::parse(r.out);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK(row["status"] == "ok");
    CHECK(std::abs(row["error_deg"].get<double>()) <= 2.0);
    CHECK(fs::exists(out / row["name"].get<std::string>() / "report.json"));
    CHECK(fs::exists(out / row["name"].get<std::string>() / "scores.csv"));
  }
  fs::remove_all(scratch());
}
