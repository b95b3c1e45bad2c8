#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support/criteria.hpp"

using namespace rwcert;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorKind load_error(const std::string& doc) {
  try {
    (void)load_chart(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "document loaded:\n" << doc;
  return ErrorKind::format;
}

const char* kTwoDim = R"json({
  "name": "test",
  "dim": 2,
  "coords": ["t", "x"],
  "metric": [["-1", "t"], ["t", "1"]],
  "u": ["1", "0"],
  "domain": [[0, 1], [0, 1]]
})json";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST(LoadChart, FlatFlrwFromCatalog) {
  const ChartSpec c = criteria::catalog_chart("flrw_flat_linear");
  EXPECT_EQ(c.name, "flrw_flat_linear");
  EXPECT_EQ(c.dim, 4);
  EXPECT_EQ(c.coords(), (std::vector<std::string>{"t", "x", "y", "z"}));
  EXPECT_EQ(c.u.size(), 4u);
  EXPECT_EQ(c.content_hash.rfind("fnv1a64:", 0), 0u);
  EXPECT_EQ(c.content_hash.size(), 8u + 16u);
}

TEST(LoadChart, ParamsAndMirroring) {
  const ChartSpec g = criteria::catalog_chart("goedel");
  EXPECT_EQ(g.symbols.params, std::vector<std::string>{"A"});
  EXPECT_TRUE(structurally_equal(g.metric[3][0], g.metric[0][3]));
  const ChartSpec c = load_chart(replace(kTwoDim, R"(["t", "1"])", R"([null, "1"])"));
  EXPECT_TRUE(structurally_equal(c.metric[1][0], c.metric[0][1]));
  const ChartSpec z = load_chart(replace(replace(kTwoDim, R"(["-1", "t"])", R"(["-1", null])"), R"(["t", "1"])",
                                         R"([null, "1"])"));
  EXPECT_EQ(z.metric[0][1].root().constant, 0.0);
}

TEST(LoadChart, SymmetryViolationReportsIndices) {
  try {
    (void)load_chart(replace(kTwoDim, R"(["t", "1"])", R"(["2*t", "1"])"));
    FAIL() << "expected a symmetry error";
  } catch (const SymmetryError& e) {
    EXPECT_EQ(e.row(), 0);
    EXPECT_EQ(e.col(), 1);
  }
}

TEST(LoadChart, Errors) {
  EXPECT_EQ(load_error(replace(kTwoDim, R"("u": ["1", "0"])", R"("u": ["1"])")), ErrorKind::dimension);
  EXPECT_EQ(load_error(replace(kTwoDim, R"("dim": 2)", R"("dim": 3)")), ErrorKind::dimension);
  EXPECT_EQ(load_error(replace(kTwoDim, R"("name": "test",)", "")), ErrorKind::format);
  EXPECT_EQ(load_error(replace(kTwoDim, "[[0, 1], [0, 1]]", "[[1, 1], [0, 1]]")), ErrorKind::format);
  EXPECT_EQ(load_error(replace(kTwoDim, R"("-1")", R"("-q")")), ErrorKind::unknown_identifier);
  EXPECT_EQ(load_error(replace(kTwoDim, R"("-1")", R"("-1 +")")), ErrorKind::syntax);
  EXPECT_EQ(load_error(replace(kTwoDim, R"("coords": ["t", "x"])", R"("coords": ["t", "t"])")), ErrorKind::format);
  EXPECT_EQ(load_error(replace(kTwoDim, R"("coords": ["t", "x"])", R"("coords": ["t", "sin"])")), ErrorKind::format);
  EXPECT_EQ(load_error(replace(kTwoDim, R"("name")", R"("nmae")")), ErrorKind::format);
  EXPECT_EQ(load_error("{not json"), ErrorKind::format);
  EXPECT_EQ(load_error("[1, 2]"), ErrorKind::format);
  EXPECT_EQ(load_error(replace(kTwoDim, R"("domain")", R"("options": {"fast": true}, "domain")")), ErrorKind::format);
}

TEST(LoadChart, NormalizeOption) {
  const ChartSpec c = load_chart(replace(kTwoDim, R"("domain")", R"("options": {"normalize_u": true}, "domain")"));
  EXPECT_TRUE(c.options.normalize_u);
  EXPECT_FALSE(load_chart(kTwoDim).options.normalize_u);
}

TEST(LoadChart, HashDependsOnBytes) {
  const ChartSpec a = load_chart(kTwoDim);
  const ChartSpec b = load_chart(std::string(kTwoDim) + "\n");
  EXPECT_NE(a.content_hash, b.content_hash);
  EXPECT_EQ(a.content_hash, load_chart(kTwoDim).content_hash);
  EXPECT_EQ(fnv1a64_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a64_hex("a"), "af63dc4c8601ec8c");
}

TEST(Catalog, SortedAndComplete) {
  const auto& all = catalog();
  EXPECT_EQ(all.size(), 9u);
  for (std::size_t i = 1; i < all.size(); ++i) EXPECT_LT(all[i - 1].id, all[i].id);
  for (const auto& e : all) {
    const ChartSpec c = e.load();
    EXPECT_EQ(c.name, e.id);
    EXPECT_GE(c.dim, 4);
  }
  EXPECT_EQ(find_catalog_entry("minkowski")->expected, Classification::ConstantCurvature);
  EXPECT_EQ(find_catalog_entry("flrw_flat_linear")->expected, Classification::LocallyRW);
  EXPECT_EQ(find_catalog_entry("schwarzschild_static_observer")->expected, Classification::NotIsotropic);
  EXPECT_FALSE(find_catalog_entry("nope").has_value());
}

TEST(Catalog, ShippedFilesMatchEmbeddedDocuments) {
  for (const auto& e : catalog()) {
    const std::string path = std::string(RWCERT_SOURCE_DIR) + "/charts/" + std::string(e.id) + ".chart.json";
    EXPECT_EQ(slurp(path), e.document) << path;
  }
}

TEST(EvalMetric, SphereComponents) {
  const ChartSpec c = load_chart(criteria::kSphere);
  const std::vector<double> p = {1.0, 0.0};
  const auto g = eval_metric<double>(c, std::span<const double>(p));
  EXPECT_DOUBLE_EQ(g[0][0], 4.0);
  EXPECT_DOUBLE_EQ(g[1][1], 4.0 * std::sin(1.0) * std::sin(1.0));
  EXPECT_EQ(g[0][1], 0.0);
  EXPECT_TRUE(c.contains(p));
  EXPECT_FALSE(c.contains(std::vector<double>{0.1, 0.0}));
}
