#pragma once

// Fermi transport along non-null unit-speed curves:
//   D_u X = ∇_u X + ε g(X, ∇_u u) u − ε g(X, u) ∇_u u,   ε = g(u,u).
// D_u u = 0 and D_u preserves inner products, so a Fermi-transported
// orthonormal frame stays orthonormal and keeps u as a member.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rwcert/chart.hpp"
#include "rwcert/error.hpp"
#include "rwcert/expr.hpp"
#include "rwcert/geometry.hpp"
#include "rwcert/jet.hpp"

namespace rwcert {

inline constexpr double kTransportTol = 1e-8;

enum class CurveKind { integral_curve_of_u, explicit_curve, geodesic };

inline const char* to_string(CurveKind k) noexcept {
  switch (k) {
    case CurveKind::integral_curve_of_u: return "integral_curve_of_u";
    case CurveKind::explicit_curve: return "explicit";
    case CurveKind::geodesic: return "geodesic";
  }
  return "?";
}

struct CurveSpec {
  CurveKind kind = CurveKind::geodesic;
  std::vector<double> start;     // integral curves and geodesics
  std::vector<double> velocity;  // geodesics
  std::string parameter = "s";   // explicit curves
  std::vector<Expr> components;  // explicit curves, one per coordinate
  double lo = 0.0;
  double hi = 1.0;
  double step = 1e-3;
  bool reparametrized = false;  // explicit curve off unit speed by < 1%
};

namespace detail {

inline std::vector<double> number_array(const nlohmann::json& j, const char* what, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw Error(ErrorKind::dimension, std::string("'") + what + "' must have " + std::to_string(dim) + " numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw Error(ErrorKind::format, std::string("'") + what + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

/// Point, dx/dλ and d²x/dλ² of an explicit curve.
struct ExplicitJet {
  Vector x, dx, ddx;
};

inline ExplicitJet explicit_jet(const CurveSpec& c, const ChartSpec& chart, double lambda) {
  const int n = chart.dim;
  ExplicitJet j{Vector(n), Vector(n), Vector(n)};
  const std::vector<Jet3> env = {Jet3::variable(0, lambda, 1)};
  for (int i = 0; i < n; ++i) {
    const Jet3 v = eval_expr<Jet3>(c.components[i], std::span<const Jet3>(env), chart.param_values);
    j.x[i] = v.value();
    j.dx[i] = v.grad(0);
    j.ddx[i] = v.hess(0, 0);
  }
  return j;
}

}  // namespace detail

/// Parse a curve document, e.g.
///   {"kind": "geodesic", "start": [...], "velocity": [...], "length": 1, "step": 1e-3}
///   {"kind": "integral_curve_of_u", "start": [...], "length": 1}
///   {"kind": "explicit", "parameter": "s", "x": ["sinh(s)", ...], "range": [0, 1]}
inline CurveSpec parse_curve(std::string_view text, const ChartSpec& chart) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::format, std::string("curve is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string())
    throw Error(ErrorKind::format, "curve must be an object with a string 'kind'");
  static const std::set<std::string> kKnown = {"kind", "start", "velocity", "parameter", "x",
                                               "range", "length", "step"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!kKnown.count(it.key())) throw Error(ErrorKind::format, "unknown curve field '" + it.key() + "'");

  CurveSpec c;
  const std::string kind = doc["kind"].get<std::string>();
  const int n = chart.dim;
  if (kind == "geodesic") {
    c.kind = CurveKind::geodesic;
  } else if (kind == "integral_curve_of_u") {
    c.kind = CurveKind::integral_curve_of_u;
  } else if (kind == "explicit") {
    c.kind = CurveKind::explicit_curve;
  } else {
    throw Error(ErrorKind::format, "unknown curve kind '" + kind + "'");
  }

  if (c.kind != CurveKind::explicit_curve) {
    if (!doc.contains("start")) throw Error(ErrorKind::format, "curve needs 'start'");
    c.start = detail::number_array(doc["start"], "start", n);
    if (c.kind == CurveKind::geodesic) {
      if (!doc.contains("velocity")) throw Error(ErrorKind::format, "geodesic needs 'velocity'");
      c.velocity = detail::number_array(doc["velocity"], "velocity", n);
    }
    c.lo = 0.0;
    c.hi = 1.0;
    if (doc.contains("length")) {
      if (!doc["length"].is_number()) throw Error(ErrorKind::format, "'length' must be a number");
      c.hi = doc["length"].get<double>();
    }
  } else {
    if (doc.contains("parameter")) {
      if (!doc["parameter"].is_string()) throw Error(ErrorKind::format, "'parameter' must be a string");
      c.parameter = doc["parameter"].get<std::string>();
    }
    if (!is_identifier(c.parameter) || is_reserved_name(c.parameter))
      throw Error(ErrorKind::format, "invalid curve parameter name '" + c.parameter + "'");
    SymbolTable symbols;
    symbols.coords = {c.parameter};
    symbols.params = chart.symbols.params;
    if (!doc.contains("x") || !doc["x"].is_array() || static_cast<int>(doc["x"].size()) != n)
      throw Error(ErrorKind::dimension, "explicit curve needs " + std::to_string(n) + " expressions in 'x'");
    for (const auto& e : doc["x"]) {
      if (!e.is_string()) throw Error(ErrorKind::format, "curve expressions must be strings");
      c.components.push_back(parse_expr(e.get<std::string>(), symbols));
    }
    if (!doc.contains("range")) throw Error(ErrorKind::format, "explicit curve needs 'range'");
    const auto r = detail::number_array(doc["range"], "range", 2);
    c.lo = r[0];
    c.hi = r[1];
  }
  if (doc.contains("step")) {
    if (!doc["step"].is_number()) throw Error(ErrorKind::format, "'step' must be a number");
    c.step = doc["step"].get<double>();
  }
  if (!(c.hi > c.lo)) throw Error(ErrorKind::format, "curve parameter range is empty");
  if (!(c.step > 0.0) || c.step > c.hi - c.lo) throw Error(ErrorKind::format, "curve step out of range");
  return c;
}

/// Check speed and causal character; explicit curves within 1% of unit speed
/// are accepted and traversed with the arclength chain rule.
inline void validate_curve(CurveSpec& c, const ChartSpec& chart) {
  auto speed2 = [&](const Connection& conn, const Vector& w) { return conn.inner(w, w); };
  if (c.kind == CurveKind::geodesic) {
    const Connection conn = connection_at(chart, c.start);
    const Vector v = Eigen::Map<const Vector>(c.velocity.data(), chart.dim);
    const double s2 = speed2(conn, v);
    if (std::abs(s2) < 1e-8) throw Error(ErrorKind::format, "null curves are not supported");
    if (std::abs(std::abs(s2) - 1.0) > 1e-8)
      throw Error(ErrorKind::format, "geodesic velocity is not unit: g(v,v) = " + format_number(s2));
    return;
  }
  if (c.kind == CurveKind::integral_curve_of_u) {
    const Connection conn = connection_at(chart, c.start);
    const ObserverField obs = observer_at(chart, conn);
    if (!chart.options.normalize_u && std::abs(std::abs(obs.raw_norm) - 1.0) > 1e-8)
      throw Error(ErrorKind::format, "u is not unit at the curve start: g(u,u) = " + format_number(obs.raw_norm));
    return;
  }
  double worst = 0.0;
  int sign = 0;
  for (int k = 0; k <= 100; ++k) {
    const double lambda = c.lo + (c.hi - c.lo) * k / 100.0;
    const auto j = detail::explicit_jet(c, chart, lambda);
    const Connection conn = connection_at(chart, std::span<const double>(j.x.data(), chart.dim));
    const double s2 = speed2(conn, j.dx);
    if (std::abs(s2) < 1e-8) throw Error(ErrorKind::format, "null curves are not supported");
    const int sg = s2 < 0 ? -1 : 1;
    if (sign != 0 && sg != sign) throw Error(ErrorKind::format, "curve changes causal character");
    sign = sg;
    worst = std::max(worst, std::abs(std::sqrt(std::abs(s2)) - 1.0));
  }
  if (worst > 1e-2)
    throw Error(ErrorKind::format, "unit-speed violation: |g(x',x')|^(1/2) deviates from 1 by " + format_number(worst));
  c.reparametrized = worst > 1e-6;
}

/// Generalized Fermi derivative given ∇_u X.
inline Vector fermi_derivative(const Matrix& g, const Vector& u, const Vector& accel, const Vector& X,
                               const Vector& nabla_u_X) {
  const double uu = u.dot(g * u);
  if (std::abs(std::abs(uu) - 1.0) > 1e-8)
    throw Error(ErrorKind::precondition, "u is not unit: g(u,u) = " + format_number(uu));
  const double eps = uu < 0 ? -1.0 : 1.0;
  return nabla_u_X + eps * X.dot(g * accel) * u - eps * X.dot(g * u) * accel;
}

enum class TransportLaw { fermi, parallel };

struct TransportRow {
  double lambda = 0.0;
  double arclength = 0.0;
  std::vector<double> point;
  std::vector<std::vector<double>> fields;
  std::vector<double> tangent;  // unit tangent
};

struct TransportLog {
  std::vector<TransportRow> rows;  // subsampled, endpoints included
  int steps = 0;                   // RK4 steps of the accepted run
  double gram_drift = 0.0;         // max |g(X_i,X_j)(λ) − g(X_i,X_j)(0)|
  double endpoint_change = 0.0;
  double tangent_norm_drift = 0.0;  // max | |g(û,û)| − 1 |
};

namespace detail {

struct CurveLocal {
  Vector dx;      // dx/dλ
  Vector u;       // unit tangent
  Vector accel;   // ∇_u u
  double sigma;   // ds/dλ
  double eps;
  Connection conn;
};

class TransportSystem {
 public:
  TransportSystem(const ChartSpec& chart, const CurveSpec& curve, TransportLaw law, int fields)
      : chart_(chart), curve_(curve), law_(law), fields_(fields), n_(chart.dim) {}

  int size() const { return n_ * (2 + fields_) + 1; }

  Vector initial(std::span<const Vector> x0) const {
    Vector y = Vector::Zero(size());
    if (curve_.kind == CurveKind::explicit_curve) {
      const auto j = explicit_jet(curve_, chart_, curve_.lo);
      y.head(n_) = j.x;
    } else {
      y.head(n_) = Eigen::Map<const Vector>(curve_.start.data(), n_);
      if (curve_.kind == CurveKind::geodesic) y.segment(n_, n_) = Eigen::Map<const Vector>(curve_.velocity.data(), n_);
    }
    for (int k = 0; k < fields_; ++k) y.segment(n_ * (2 + k), n_) = x0[k];
    return y;
  }

  CurveLocal local(double lambda, const Vector& y) const {
    Vector x = y.head(n_);
    Vector dx(n_), ddx = Vector::Zero(n_);
    if (curve_.kind == CurveKind::explicit_curve) {
      const auto j = explicit_jet(curve_, chart_, lambda);
      x = j.x;
      dx = j.dx;
      ddx = j.ddx;
    }
    Connection conn = at(x);
    Vector accel;
    double sigma = 1.0;
    if (curve_.kind == CurveKind::geodesic) {
      dx = y.segment(n_, n_);
      sigma = std::sqrt(std::abs(conn.inner(dx, dx)));
      accel = Vector::Zero(n_);
    } else if (curve_.kind == CurveKind::integral_curve_of_u) {
      const ObserverField obs = observer_at(chart_, conn);
      dx = obs.u_value;
      accel = obs.acceleration;
    } else {
      sigma = std::sqrt(std::abs(conn.inner(dx, dx)));
      const double eps = conn.inner(dx, dx) < 0 ? -1.0 : 1.0;
      const Vector A = ddx + conn.contract(dx, dx);
      accel = (A - eps * conn.inner(A, dx) / (sigma * sigma) * dx) / (sigma * sigma);
    }
    const Vector u = dx / sigma;
    const double eps = conn.inner(u, u) < 0 ? -1.0 : 1.0;
    return {dx, u, accel, sigma, eps, std::move(conn)};
  }

  Vector rhs(double lambda, const Vector& y) const {
    const CurveLocal c = local(lambda, y);
    Vector d = Vector::Zero(size());
    d.head(n_) = c.dx;
    if (curve_.kind == CurveKind::geodesic) d.segment(n_, n_) = -c.conn.contract(c.dx, c.dx);
    for (int k = 0; k < fields_; ++k) {
      const Vector X = y.segment(n_ * (2 + k), n_);
      Vector dX = -c.conn.contract(c.dx, X);
      if (law_ == TransportLaw::fermi) {
        // ∇_u X = −ε g(X, a) u + ε g(X, u) a
        dX += c.sigma * (-c.eps * c.conn.inner(X, c.accel) * c.u + c.eps * c.conn.inner(X, c.u) * c.accel);
      }
      d.segment(n_ * (2 + k), n_) = dX;
    }
    d[size() - 1] = c.sigma;
    return d;
  }

  Connection at(const Vector& x) const {
    try {
      return connection_at(chart_, std::span<const double>(x.data(), n_));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::precondition)
        throw Error(ErrorKind::integration, std::string("curve leaves the chart domain: ") + e.what());
      throw;
    }
  }

  int fields() const { return fields_; }
  int dim() const { return n_; }

 private:
  const ChartSpec& chart_;
  const CurveSpec& curve_;
  TransportLaw law_;
  int fields_;
  int n_;
};

inline Matrix gram(const TransportSystem& sys, const Connection& conn, const Vector& y) {
  const int n = sys.dim(), m = sys.fields();
  Matrix G(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) G(i, j) = conn.inner(y.segment(n * (2 + i), n), y.segment(n * (2 + j), n));
  return G;
}

}  // namespace detail

/// Transport the fields `x0` along the curve by RK4, doubling the step count
/// until the endpoint changes by less than 1e-8.
inline TransportLog transport(const ChartSpec& chart, CurveSpec curve, std::span<const Vector> x0,
                              TransportLaw law = TransportLaw::fermi, int max_rows = 100) {
  validate_curve(curve, chart);
  for (const auto& X : x0) {
    if (X.size() != chart.dim) throw Error(ErrorKind::dimension, "transported vector has wrong dimension");
    if (!X.allFinite()) throw Error(ErrorKind::format, "transported vector is not finite");
  }
  const detail::TransportSystem sys(chart, curve, law, static_cast<int>(x0.size()));
  const int n = chart.dim;

  auto run = [&](int steps, TransportLog* log) {
    const double h = (curve.hi - curve.lo) / steps;
    Vector y = sys.initial(x0);
    const Matrix g0 = detail::gram(sys, sys.at(y.head(n)), y);
    const int stride = std::max(1, steps / std::max(1, max_rows));
    auto record = [&](double lambda, const Vector& state) {
      if (!log) return;
      const detail::CurveLocal c = sys.local(lambda, state);
      const Matrix G = detail::gram(sys, c.conn, state);
      log->gram_drift = std::max(log->gram_drift, G.size() ? (G - g0).cwiseAbs().maxCoeff() : 0.0);
      log->tangent_norm_drift = std::max(log->tangent_norm_drift, std::abs(std::abs(c.conn.inner(c.u, c.u)) - 1.0));
    };
    auto row = [&](double lambda, const Vector& state) {
      TransportRow r;
      r.lambda = lambda;
      r.arclength = state[sys.size() - 1];
      const detail::CurveLocal c = sys.local(lambda, state);
      const Vector x = curve.kind == CurveKind::explicit_curve ? detail::explicit_jet(curve, chart, lambda).x
                                                                : Vector(state.head(n));
      r.point.assign(x.data(), x.data() + n);
      r.tangent.assign(c.u.data(), c.u.data() + n);
      for (int k = 0; k < sys.fields(); ++k) {
        const Vector X = state.segment(n * (2 + k), n);
        r.fields.emplace_back(X.data(), X.data() + n);
      }
      log->rows.push_back(std::move(r));
    };
    if (log) {
      record(curve.lo, y);
      row(curve.lo, y);
    }
    for (int i = 0; i < steps; ++i) {
      const double lambda = curve.lo + i * h;
      const Vector k1 = sys.rhs(lambda, y);
      const Vector k2 = sys.rhs(lambda + 0.5 * h, y + 0.5 * h * k1);
      const Vector k3 = sys.rhs(lambda + 0.5 * h, y + 0.5 * h * k2);
      const Vector k4 = sys.rhs(lambda + h, y + h * k3);
      y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!y.allFinite()) throw Error(ErrorKind::integration, "transport state became non-finite");
      if (log) {
        const double next = i + 1 == steps ? curve.hi : curve.lo + (i + 1) * h;
        record(next, y);
        if ((i + 1) % stride == 0 || i + 1 == steps) row(next, y);
      }
    }
    return y;
  };

  int steps = std::max(1, static_cast<int>(std::llround((curve.hi - curve.lo) / curve.step)));
  Vector prev = run(steps, nullptr);
  for (int round = 0; round < 10; ++round) {
    const Vector next = run(2 * steps, nullptr);
    const double change = (next.head(sys.size() - 1) - prev.head(sys.size() - 1)).cwiseAbs().maxCoeff();
    steps *= 2;
    prev = next;
    if (change < kTransportTol) {
      TransportLog log;
      log.steps = steps;
      log.endpoint_change = change;
      run(steps, &log);
      return log;
    }
  }
  throw Error(ErrorKind::integration, "transport did not converge under step halving");
}

/// Fermi-transport an orthonormal frame whose last vector is the unit tangent.
inline TransportLog fermi_frame(const ChartSpec& chart, CurveSpec curve, std::span<const Vector> frame0) {
  validate_curve(curve, chart);
  const int n = chart.dim;
  if (static_cast<int>(frame0.size()) != n) throw Error(ErrorKind::dimension, "frame needs dim vectors");
  const detail::TransportSystem sys(chart, curve, TransportLaw::fermi, 0);
  const Vector y0 = sys.initial({});
  const detail::CurveLocal c = sys.local(curve.lo, y0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double gij = c.conn.inner(frame0[i], frame0[j]);
      const double want = i == j ? (gij < 0 ? -1.0 : 1.0) : 0.0;
      if (std::abs(gij - want) > 1e-8) throw Error(ErrorKind::format, "initial frame is not orthonormal");
    }
  if ((frame0.back() - c.u).cwiseAbs().maxCoeff() > 1e-8)
    throw Error(ErrorKind::format, "last frame vector must be the unit tangent");
  return transport(chart, std::move(curve), frame0, TransportLaw::fermi);
}

/// Orthonormal frame at the curve start with the unit tangent last.
inline std::vector<Vector> initial_frame(const ChartSpec& chart, CurveSpec curve, std::uint64_t seed = 0) {
  validate_curve(curve, chart);
  const detail::TransportSystem sys(chart, curve, TransportLaw::fermi, 0);
  const detail::CurveLocal c = sys.local(curve.lo, sys.initial({}));
  const AdaptedFrame f = adapted_frame(c.conn.g_value, c.u, seed);
  std::vector<Vector> out;
  for (int a = 1; a < f.dim(); ++a) out.push_back(f.e(a));
  out.push_back(f.e(0));
  return out;
}

struct GeodesicPath {
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> velocities;
  double norm_drift = 0.0;  // max |g(ẋ,ẋ) − g(ẋ,ẋ)(0)|
};

/// RK4 on ẍ + Γ(ẋ, ẋ) = 0 with a fixed number of steps.
inline GeodesicPath geodesic_integrate(const ChartSpec& chart, std::span<const double> p, std::span<const double> v,
                                       double length, int steps) {
  const int n = chart.dim;
  if (static_cast<int>(p.size()) != n || static_cast<int>(v.size()) != n)
    throw Error(ErrorKind::dimension, "geodesic start has wrong dimension");
  if (steps < 1) throw Error(ErrorKind::format, "steps must be positive");
  CurveSpec curve;
  curve.kind = CurveKind::geodesic;
  curve.start.assign(p.begin(), p.end());
  curve.velocity.assign(v.begin(), v.end());
  curve.hi = length;
  const Connection c0 = connection_at(chart, p);
  const Vector v0 = Eigen::Map<const Vector>(v.data(), n);
  const double norm0 = c0.inner(v0, v0);
  if (std::abs(std::abs(norm0) - 1.0) > 1e-8)
    throw Error(ErrorKind::precondition, "geodesic velocity is not unit: g(v,v) = " + format_number(norm0));
  const detail::TransportSystem sys(chart, curve, TransportLaw::parallel, 0);

  GeodesicPath path;
  Vector y = sys.initial({});
  auto keep = [&](const Vector& s) {
    path.points.emplace_back(s.data(), s.data() + n);
    path.velocities.emplace_back(s.data() + n, s.data() + 2 * n);
    const Connection c = sys.at(s.head(n));
    path.norm_drift = std::max(path.norm_drift, std::abs(c.inner(s.segment(n, n), s.segment(n, n)) - norm0));
  };
  keep(y);
  const double h = length / steps;
  for (int i = 0; i < steps; ++i) {
    const double lambda = i * h;
    const Vector k1 = sys.rhs(lambda, y);
    const Vector k2 = sys.rhs(lambda + 0.5 * h, y + 0.5 * h * k1);
    const Vector k3 = sys.rhs(lambda + 0.5 * h, y + 0.5 * h * k2);
    const Vector k4 = sys.rhs(lambda + h, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    keep(y);
  }
  return path;
}

}  // namespace rwcert
