#pragma once

// Chart documents: a coordinate patch with metric components, a contravariant
// vector field u, named parameters and a rectangular sampling domain, all as
// JSON with string-valued expressions.

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rwcert/error.hpp"
#include "rwcert/expr.hpp"

namespace rwcert {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct ChartOptions {
  bool normalize_u = false;
};

struct ChartSpec {
  std::string name;
  int dim = 0;
  SymbolTable symbols;                 // coords and params, in declaration / sorted order
  std::vector<double> param_values;    // aligned with symbols.params
  std::vector<std::vector<Expr>> metric;  // dim x dim, metric[i][j] structurally equal to metric[j][i]
  std::vector<Expr> u;                    // contravariant components
  std::vector<Interval> domain;
  ChartOptions options;
  std::string source_text;
  std::string content_hash;  // "fnv1a64:<hex>" of source_text

  const std::vector<std::string>& coords() const { return symbols.coords; }

  bool contains(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim) return false;
    for (int i = 0; i < dim; ++i)
      if (!domain[i].contains(p[i])) return false;
    return true;
  }
};

inline std::string fnv1a64_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = kHex[h & 0xF];
  return out;
}

namespace detail {

inline Error format_error(const std::string& msg) { return Error(ErrorKind::format, msg); }

inline const nlohmann::json& require(const nlohmann::json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw format_error(std::string("missing section '") + key + "'");
  return *it;
}

inline Expr parse_component(const std::string& text, const SymbolTable& symbols, const std::string& where) {
  try {
    return parse_expr(text, symbols);
  } catch (const Error& e) {
    throw Error(e.kind(), where + ": " + e.what());
  }
}

}  // namespace detail

/// Parse and validate a chart document.
inline ChartSpec load_chart(std::string_view document) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw detail::format_error(std::string("chart is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw detail::format_error("chart document must be a JSON object");

  static const std::set<std::string> kKnown = {"name", "dim", "coords", "metric", "u", "params", "domain",
                                               "options"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!kKnown.count(it.key())) throw detail::format_error("unknown field '" + it.key() + "'");

  ChartSpec chart;
  chart.source_text = std::string(document);
  chart.content_hash = "fnv1a64:" + fnv1a64_hex(document);

  const json& name = detail::require(doc, "name");
  if (!name.is_string()) throw detail::format_error("'name' must be a string");
  chart.name = name.get<std::string>();

  const json& dim = detail::require(doc, "dim");
  if (!dim.is_number_integer()) throw detail::format_error("'dim' must be an integer");
  chart.dim = dim.get<int>();
  if (chart.dim < 2 || chart.dim > kMaxDim)
    throw Error(ErrorKind::dimension, "'dim' must lie in [2, " + std::to_string(kMaxDim) + "]");
  const int n = chart.dim;

  const json& coords = detail::require(doc, "coords");
  if (!coords.is_array()) throw detail::format_error("'coords' must be an array of names");
  if (static_cast<int>(coords.size()) != n)
    throw Error(ErrorKind::dimension, "'coords' has " + std::to_string(coords.size()) + " names for dim " +
                                          std::to_string(n));
  std::set<std::string> seen;
  for (const auto& c : coords) {
    if (!c.is_string()) throw detail::format_error("coordinate names must be strings");
    const auto s = c.get<std::string>();
    if (!is_identifier(s) || is_reserved_name(s))
      throw detail::format_error("invalid coordinate name '" + s + "'");
    if (!seen.insert(s).second) throw detail::format_error("duplicate name '" + s + "'");
    chart.symbols.coords.push_back(s);
  }

  if (auto it = doc.find("params"); it != doc.end()) {
    if (!it->is_object()) throw detail::format_error("'params' must be an object of numbers");
    std::map<std::string, double> sorted;
    for (auto p = it->begin(); p != it->end(); ++p) {
      if (!p.value().is_number()) throw detail::format_error("parameter '" + p.key() + "' must be a number");
      if (!is_identifier(p.key()) || is_reserved_name(p.key()))
        throw detail::format_error("invalid parameter name '" + p.key() + "'");
      if (!seen.insert(p.key()).second) throw detail::format_error("duplicate name '" + p.key() + "'");
      sorted[p.key()] = p.value().get<double>();
    }
    for (const auto& [k, v] : sorted) {
      chart.symbols.params.push_back(k);
      chart.param_values.push_back(v);
    }
  }

  const json& metric = detail::require(doc, "metric");
  if (!metric.is_array() || static_cast<int>(metric.size()) != n)
    throw Error(ErrorKind::dimension, "'metric' must have " + std::to_string(n) + " rows");
  std::vector<std::vector<std::string>> text(n, std::vector<std::string>(n));
  for (int i = 0; i < n; ++i) {
    const json& row = metric[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw Error(ErrorKind::dimension, "metric row " + std::to_string(i) + " must have " + std::to_string(n) +
                                            " entries");
    for (int j = 0; j < n; ++j) {
      if (row[j].is_null()) continue;
      if (!row[j].is_string())
        throw detail::format_error("metric entry (" + std::to_string(i) + "," + std::to_string(j) +
                                   ") must be a string or null");
      text[i][j] = row[j].get<std::string>();
    }
  }
  chart.metric.assign(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::string a = text[i][j], b = text[j][i];
      if (a.empty() && b.empty()) a = b = "0";
      if (a.empty()) a = b;
      if (b.empty()) b = a;
      const std::string where = "metric[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      Expr upper = detail::parse_component(a, chart.symbols, where);
      Expr lower = detail::parse_component(b, chart.symbols, where);
      if (!structurally_equal(upper, lower)) throw SymmetryError(i, j);
      chart.metric[i][j] = upper;
      chart.metric[j][i] = upper;
    }
  }

  const json& u = detail::require(doc, "u");
  if (!u.is_array()) throw detail::format_error("'u' must be an array of strings");
  if (static_cast<int>(u.size()) != n)
    throw Error(ErrorKind::dimension, "'u' has " + std::to_string(u.size()) + " components for dim " +
                                          std::to_string(n));
  for (int i = 0; i < n; ++i) {
    if (!u[i].is_string()) throw detail::format_error("u components must be strings");
    chart.u.push_back(
        detail::parse_component(u[i].get<std::string>(), chart.symbols, "u[" + std::to_string(i) + "]"));
  }

  const json& domain = detail::require(doc, "domain");
  if (!domain.is_array() || static_cast<int>(domain.size()) != n)
    throw Error(ErrorKind::dimension, "'domain' must have " + std::to_string(n) + " intervals");
  for (int i = 0; i < n; ++i) {
    const json& iv = domain[i];
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
      throw detail::format_error("domain entry " + std::to_string(i) + " must be [lo, hi]");
    Interval interval{iv[0].get<double>(), iv[1].get<double>()};
    if (!(interval.lo < interval.hi))
      throw detail::format_error("domain interval " + std::to_string(i) + " is degenerate");
    chart.domain.push_back(interval);
  }

  if (auto it = doc.find("options"); it != doc.end()) {
    if (!it->is_object()) throw detail::format_error("'options' must be an object");
    for (auto o = it->begin(); o != it->end(); ++o) {
      if (o.key() == "normalize_u") {
        if (!o.value().is_boolean()) throw detail::format_error("'normalize_u' must be a boolean");
        chart.options.normalize_u = o.value().get<bool>();
      } else {
        throw detail::format_error("unknown option '" + o.key() + "'");
      }
    }
  }
  return chart;
}

/// Metric components evaluated over any scalar type at seeded coordinates.
template <class S>
std::vector<std::vector<S>> eval_metric(const ChartSpec& chart, std::span<const S> env) {
  const int n = chart.dim;
  std::vector<std::vector<S>> g(n, std::vector<S>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      g[i][j] = eval_expr<S>(chart.metric[i][j], env, chart.param_values);
      g[j][i] = g[i][j];
    }
  return g;
}

template <class S>
std::vector<S> seed_point(std::span<const double> point) {
  const int n = static_cast<int>(point.size());
  std::vector<S> env;
  env.reserve(n);
  for (int i = 0; i < n; ++i) env.push_back(ScalarTraits<S>::variable(i, point[i], n));
  return env;
}

}  // namespace rwcert
