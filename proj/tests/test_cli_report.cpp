#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "support/criteria.hpp"

using namespace rwcert;
using criteria::cli;
using nlohmann::json;

namespace {

class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("rwcert_test_" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string write(const std::string& name, std::string_view text) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, ListsCatalogInOrder) {
  const auto r = cli({"list"});
  EXPECT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> ids;
  while (std::getline(lines, line)) {
    std::istringstream words(line);
    std::string id, expected;
    words >> id >> expected;
    ids.push_back(id);
    EXPECT_EQ(to_string(find_catalog_entry(id)->expected), expected);
  }
  ASSERT_EQ(ids.size(), catalog().size());
  for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(ids[i], catalog()[i].id);
}

TEST(Cli, ShowPrintsDocument) {
  const auto r = cli({"show", "goedel"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, find_catalog_entry("goedel")->document);
}

TEST(Cli, CheckReport) {
  const auto r = cli({"check", "flrw_open", "--points", "12", "--seed", "5", "--expect", "LocallyRW"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_EQ(rep["report_version"], 1);
  EXPECT_EQ(rep["command"], "check");
  EXPECT_EQ(rep["chart"]["name"], "flrw_open");
  EXPECT_EQ(rep["chart"]["content_hash"], find_catalog_entry("flrw_open")->load().content_hash);
  EXPECT_EQ(rep["flags"]["points"], 12);
  EXPECT_EQ(rep["flags"]["seed"], 5);
  EXPECT_EQ(rep["flags"]["expect"], "LocallyRW");
  EXPECT_FALSE(rep["flags"].contains("threads"));
  EXPECT_EQ(rep["certificate"]["classification"], "LocallyRW");
  EXPECT_EQ(rep["certificate"]["samples"], 12);
  for (const char* check : {"eq13", "eq14", "a43", "a44", "skewA1", "bianchi31", "bianchi32", "bianchi33", "shear",
                            "closedness", "geodesy"})
    EXPECT_LT(rep["certificate"]["max_residuals"][check].get<double>(), 1e-7) << check;
  EXPECT_EQ(rep["outcome"]["exit_code"], 0);
  EXPECT_NE(r.err.find("elapsed:"), std::string::npos);
}

TEST(Cli, ExpectMismatchFails) {
  const auto r = cli({"check", "minkowski", "--points", "8", "--expect", "LocallyRW"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("expected LocallyRW, got ConstantCurvature"), std::string::npos);
  EXPECT_EQ(json::parse(r.out)["outcome"]["exit_code"], 1);
  EXPECT_EQ(cli({"check", "minkowski", "--points", "8", "--expect", "Flat"}).code, 2);
}

TEST(Cli, InputErrors) {
  TempDir dir;
  EXPECT_EQ(cli({"check", dir.file("missing.chart.json")}).code, 2);
  EXPECT_EQ(cli({"check", dir.write("bad.chart.json", "{\"name\": ")}).code, 2);
  const auto asym = cli({"check", dir.write("asym.chart.json", R"json({
  "name": "asym",
  "dim": 4,
  "coords": ["t", "x", "y", "z"],
  "metric": [["-1", "t", "0", "0"], ["2*t", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
  "u": ["1", "0", "0", "0"],
  "domain": [[0, 1], [0, 1], [0, 1], [0, 1]]
})json")});
  EXPECT_EQ(asym.code, 2);
  EXPECT_NE(asym.err.find("symmetry"), std::string::npos) << asym.err;
  EXPECT_EQ(cli({"check", "minkowski", "--points", "-3"}).code, 2);
  EXPECT_EQ(cli({"check", "minkowski", "--tol", "0"}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"check"}).code, 2);
  EXPECT_EQ(cli({"slice", "flrw_open", "--base", "1,2"}).code, 2);
  EXPECT_EQ(cli({"slice", "flrw_open", "--tau", "1:0:0.1"}).code, 2);
}

TEST(Cli, CheckLowDimensionChartIsInputError) {
  TempDir dir;
  EXPECT_EQ(cli({"check", dir.write("sphere.chart.json", criteria::kSphere)}).code, 2);
}

TEST(Cli, SliceRefusesConstantCurvature) {
  const auto r = cli({"slice", "minkowski", "--points", "8"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("ConstantCurvature: foliation not applicable"), std::string::npos);
  const json rep = json::parse(r.out);
  EXPECT_FALSE(rep.contains("foliation"));
  EXPECT_EQ(rep["outcome"]["message"], "ConstantCurvature: foliation not applicable");
}

TEST(Cli, SliceEinsteinStatic) {
  const auto r = cli({"slice", "einstein_static", "--points", "8", "--tau", "-0.5,0,0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  const json& fol = rep["foliation"];
  EXPECT_EQ(fol["epsilon"], -1);
  EXPECT_EQ(fol["curvature_sign"], 1);
  ASSERT_EQ(fol["samples"].size(), 3u);
  for (const auto& s : fol["samples"]) {
    EXPECT_NEAR(s["a"].get<double>(), 1.0, 1e-10);
    EXPECT_NEAR(s["k_hat"].get<double>(), 0.25, 1e-10);
  }
  EXPECT_EQ(fol["normal_form"]["k"], 1);
  for (const auto& row : fol["normal_form"]["proper_time_a"]) EXPECT_NEAR(row[1].get<double>(), 2.0, 1e-10);
  EXPECT_EQ(rep["flags"]["tau"], json::parse("[-0.5, 0, 0.5]"));
}

TEST(Cli, TransportRindlerOnFile) {
  TempDir dir;
  const std::string chart = dir.write("wide.chart.json", criteria::kWideMinkowski);
  const std::string curve = dir.write(
      "rindler.json", R"json({"kind": "explicit", "x": ["sinh(s)", "cosh(s)", "0", "0"], "range": [0, 1]})json");
  const auto r = cli({"transport", chart, "--curve", curve, "--x0", "0,1,0,0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_EQ(rep["command"], "transport");
  EXPECT_EQ(rep["chart"]["source"], chart);
  const json& last = rep["transport"]["rows"].back();
  EXPECT_EQ(last["lambda"], 1.0);
  EXPECT_NEAR(last["fields"][0][0].get<double>(), std::sinh(1.0), 1e-8);
  EXPECT_NEAR(last["fields"][0][1].get<double>(), std::cosh(1.0), 1e-8);
  EXPECT_EQ(rep["transport"]["law"], "fermi");
}

TEST(Cli, TransportRejectsOffSpeedCurve) {
  const auto r = cli({"transport", "minkowski", "--curve",
                      R"json({"kind": "explicit", "x": ["0", "1.4142135623730951*s", "0", "0"], "range": [0, 0.5]})json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("unit-speed"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, TransportDefaultFrameAndDriftLimit) {
  const std::string curve = R"json({"kind": "integral_curve_of_u", "start": [-0.5, 10, 1.2, 1]})json";
  const auto r = cli({"transport", "schwarzschild_static_observer", "--curve", curve});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_EQ(rep["flags"]["x0"].size(), 4u);
  EXPECT_EQ(rep["transport"]["rows"].front()["fields"].size(), 4u);
  const auto tight = cli({"transport", "schwarzschild_static_observer", "--curve", curve, "--drift-tol", "1e-300"});
  EXPECT_EQ(tight.code, 1);
}

TEST(Cli, ReportFile) {
  TempDir dir;
  const std::string path = dir.file("report.json");
  const auto r = cli({"check", "goedel", "--points", "8", "--report", path});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  const json rep = json::parse(slurp(path));
  EXPECT_EQ(rep["certificate"]["classification"], "NotIsotropic");
  EXPECT_EQ(slurp(path), cli({"check", "goedel", "--points", "8"}).out);
  EXPECT_EQ(cli({"check", "goedel", "--points", "8", "--report", dir.file("no/such/dir/r.json")}).code, 2);
}

TEST(Cli, DeterministicAcrossThreads) {
  const criteria::Verdict v = criteria::determinism();
  EXPECT_TRUE(v.pass) << v.detail;
}

TEST(Report, NumbersRoundTrip) {
  json j;
  j["x"] = 0.1;
  j["y"] = 1.0 / 3.0;
  j["z"] = 12;
  const json back = json::parse(render_report(j));
  EXPECT_EQ(back["x"].get<double>(), 0.1);
  EXPECT_EQ(back["y"].get<double>(), 1.0 / 3.0);
  EXPECT_EQ(back["z"], 12);
}
