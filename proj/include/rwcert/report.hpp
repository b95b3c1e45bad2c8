#pragma once

// Deterministic JSON reports: fixed key order, 17 significant digits for
// every double, non-finite values written as null.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "rwcert/fermi.hpp"
#include "rwcert/foliation.hpp"
#include "rwcert/isotropy.hpp"

namespace rwcert {

using Json = nlohmann::ordered_json;

inline constexpr int kReportVersion = 1;

namespace detail {

inline void dump_string(const std::string& s, std::string& out) {
  // nlohmann escapes exactly as JSON requires
  out += Json(s).dump();
}

inline void dump(const Json& j, std::string& out, int indent) {
  const std::string pad(indent + 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_string(it.key(), out);
        out += ": ";
        dump(it.value(), out, indent + 2);
      }
      out += "\n" + std::string(indent, ' ') + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(j[i], out, indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], out, indent + 2);
      }
      out += "\n" + std::string(indent, ' ') + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

inline Json vector_json(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace detail

inline std::string render_report(const Json& j) {
  std::string out;
  detail::dump(j, out, 0);
  out += "\n";
  return out;
}

inline Json residuals_json(const Residuals& r) {
  Json j = Json::object();
  for (auto c : kAllChecks) {
    const auto& v = r[c];
    if (v)
      j[to_string(c)] = *v;
    else
      j[to_string(c)] = nullptr;
  }
  return j;
}

inline Json certificate_json(const Certificate& c) {
  Json j;
  j["classification"] = to_string(c.classification);
  j["evidence"] = "sampled";
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["tolerances"] = {{"pass", c.tol_pass}, {"margin", c.tol_margin}};
  j["max_residuals"] = residuals_json(c.max_residuals);
  j["nondegeneracy"] = {{"min", c.min_nondegeneracy}, {"max", c.max_nondegeneracy}};
  j["constant_curvature_residual"] = c.max_constant_curvature;
  j["notes"] = c.notes;
  j["tool_version"] = c.tool_version;
  return j;
}

inline Json foliation_json(const FoliationResult& r) {
  Json j;
  j["base"] = detail::vector_json(r.base);
  j["epsilon"] = r.epsilon;
  j["time_convention"] = "dt(d/dt) = 1 with d/dt = eps*u/(h - eps*f)";
  j["curvature_sign"] = r.curvature_sign;
  j["k_hat_spread"] = r.k_hat_spread;
  j["loop_residual"] = r.loop_residual;
  j["tolerances"] = {{"quadrature", r.quadrature_tol}, {"flow", r.flow_tol}};
  Json rows = Json::array();
  for (const auto& s : r.samples) {
    Json row;
    row["tau"] = s.tau;
    row["proper_time"] = s.proper_time;
    row["point"] = detail::vector_json(s.point);
    row["a"] = s.a;
    row["K_tau"] = s.k_tau;
    row["k_hat"] = s.k_hat;
    row["psi"] = s.psi;
    rows.push_back(std::move(row));
  }
  j["samples"] = std::move(rows);
  Json table = Json::array();
  for (const auto& s : r.samples) table.push_back({s.proper_time, s.a_normal});
  j["normal_form"] = {{"epsilon", r.epsilon}, {"k", r.curvature_sign}, {"scale", r.normal_scale},
                      {"proper_time_a", std::move(table)}};
  return j;
}

inline Json transport_json(const TransportLog& log, const CurveSpec& curve, TransportLaw law) {
  Json j;
  j["curve_kind"] = to_string(curve.kind);
  j["law"] = law == TransportLaw::fermi ? "fermi" : "parallel";
  j["range"] = {curve.lo, curve.hi};
  j["steps"] = log.steps;
  j["endpoint_change"] = log.endpoint_change;
  j["gram_drift"] = log.gram_drift;
  j["tangent_norm_drift"] = log.tangent_norm_drift;
  Json rows = Json::array();
  for (const auto& r : log.rows) {
    Json row;
    row["lambda"] = r.lambda;
    row["arclength"] = r.arclength;
    row["point"] = detail::vector_json(r.point);
    Json fields = Json::array();
    for (const auto& f : r.fields) fields.push_back(detail::vector_json(f));
    row["fields"] = std::move(fields);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace rwcert
