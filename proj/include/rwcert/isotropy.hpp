#pragma once

// Pointwise extraction of (ε, f, h) for a unit field u and the residuals of
// the curvature identities that characterize locally Robertson–Walker charts:
//   R(x,u)u = f x,   R(x,y)z = h (g(y,z)x − g(x,z)y)   for x, y, z ⟂ u,
// with h − εf ≠ 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "rwcert/chart.hpp"
#include "rwcert/error.hpp"
#include "rwcert/geometry.hpp"
#include "rwcert/random.hpp"
#include "rwcert/tensor.hpp"

namespace rwcert {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum class Check { eq13, eq14, a43, a44, skewA1, bianchi31, bianchi32, bianchi33, shear, closedness, geodesy };
inline constexpr int kCheckCount = 11;
inline constexpr std::array<Check, kCheckCount> kAllChecks = {
    Check::eq13,      Check::eq14,      Check::a43,       Check::a44,   Check::skewA1,    Check::bianchi31,
    Check::bianchi32, Check::bianchi33, Check::shear,     Check::closedness, Check::geodesy};

inline const char* to_string(Check c) noexcept {
  static constexpr const char* kNames[] = {"eq13",      "eq14",      "a43",   "a44",        "skewA1", "bianchi31",
                                           "bianchi32", "bianchi33", "shear", "closedness", "geodesy"};
  return kNames[static_cast<int>(c)];
}

/// One value per check; shear may be absent (not applicable).
struct Residuals {
  std::array<std::optional<double>, kCheckCount> values{};

  std::optional<double>& operator[](Check c) { return values[static_cast<int>(c)]; }
  const std::optional<double>& operator[](Check c) const { return values[static_cast<int>(c)]; }

  double max_present() const {
    double m = 0.0;
    for (const auto& v : values)
      if (v) m = std::max(m, *v);
    return m;
  }
};

enum class Classification { LocallyRW, ConstantCurvature, NotIsotropic, Degenerate };

inline const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::LocallyRW: return "LocallyRW";
    case Classification::ConstantCurvature: return "ConstantCurvature";
    case Classification::NotIsotropic: return "NotIsotropic";
    case Classification::Degenerate: return "Degenerate";
  }
  return "?";
}

inline std::optional<Classification> parse_classification(std::string_view s) {
  for (auto c : {Classification::LocallyRW, Classification::ConstantCurvature, Classification::NotIsotropic,
                 Classification::Degenerate})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

struct Invariants {
  int epsilon = 1;
  double f = 0.0;
  double h = 0.0;
  double margin() const { return std::abs(h - epsilon * f); }
};

/// R_{abcd} in adapted-frame components.
using FrameCurvature = Tensor<double, 4>;

inline FrameCurvature frame_curvature(const PointGeometry& geom, const AdaptedFrame& frame) {
  const int n = geom.dim;
  const Matrix& E = frame.vectors;
  // contract one index at a time: O(n^5)
  Tensor<double, 4> t0(n, 0.0), t1(n, 0.0);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int d = 0; d < n; ++d) {
          double acc = 0.0;
          for (int v = 0; v < n; ++v) acc += geom.riemann_low(r, s, m, v).value() * E(v, d);
          t0(r, s, m, d) = acc;
        }
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double acc = 0.0;
          for (int m = 0; m < n; ++m) acc += t0(r, s, m, d) * E(m, c);
          t1(r, s, c, d) = acc;
        }
  for (int r = 0; r < n; ++r)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double acc = 0.0;
          for (int s = 0; s < n; ++s) acc += t1(r, s, c, d) * E(s, b);
          t0(r, b, c, d) = acc;
        }
  FrameCurvature out(n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double acc = 0.0;
          for (int r = 0; r < n; ++r) acc += t0(r, b, c, d) * E(r, a);
          out(a, b, c, d) = acc;
        }
  return out;
}

inline double frame_scale(const FrameCurvature& rf) {
  double m = 0.0;
  for (double x : rf) m = std::max(m, std::abs(x));
  return 1.0 + m;
}

/// ε = g(u,u), f = η₁ g(R(e₁,u)u, e₁), h = η₁η₂ g(R(e₁,e₂)e₂, e₁).
inline Invariants extract_invariants(const FrameCurvature& rf, const AdaptedFrame& frame) {
  if (frame.dim() < 4) throw Error(ErrorKind::dimension, "invariant extraction needs dim >= 4");
  Invariants inv;
  inv.epsilon = frame.eta[0];
  inv.f = frame.eta[1] * rf(1, 0, 1, 0);
  inv.h = frame.eta[1] * frame.eta[2] * rf(1, 2, 1, 2);
  return inv;
}

inline Invariants extract_invariants(const PointGeometry& geom, const AdaptedFrame& frame) {
  return extract_invariants(frame_curvature(geom, frame), frame);
}

namespace detail {

// Vectors below are adapted-frame coefficients; `lowered` gives g(V, e_d).
inline Vector lowered(const AdaptedFrame& frame, const Vector& v) {
  Vector out(v.size());
  for (int d = 0; d < v.size(); ++d) out[d] = frame.eta[d] * v[d];
  return out;
}

inline double frame_inner(const AdaptedFrame& frame, const Vector& x, const Vector& y) {
  double s = 0.0;
  for (int d = 0; d < x.size(); ++d) s += frame.eta[d] * x[d] * y[d];
  return s;
}

/// g(R(x,y)z, e_d)
inline Vector riemann_lowered(const FrameCurvature& rf, const Vector& x, const Vector& y, const Vector& z) {
  const int n = static_cast<int>(x.size());
  Vector out = Vector::Zero(n);
  for (int d = 0; d < n; ++d) {
    double acc = 0.0;
    for (int c = 0; c < n; ++c) {
      if (z[c] == 0.0) continue;
      for (int a = 0; a < n; ++a) {
        if (x[a] == 0.0) continue;
        for (int b = 0; b < n; ++b) acc += rf(d, c, a, b) * x[a] * y[b] * z[c];
      }
    }
    out[d] = acc;
  }
  return out;
}

inline Vector random_spatial(int n, Rng& rng) {
  Vector v = Vector::Zero(n);
  double norm = 0.0;
  while (norm < 1e-3) {
    for (int i = 1; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
    norm = v.norm();
  }
  return v / norm;
}

}  // namespace detail

/// Spatial probes in frame coefficients: the frame axes with all their pairs
/// and triples, plus `extra` random unit mixtures of each arity. The
/// antisymmetry check needs orthonormal pairs, drawn separately.
struct ProbeSet {
  std::vector<Vector> singles;
  std::vector<std::array<Vector, 2>> pairs;
  std::vector<std::array<Vector, 3>> triples;
  std::vector<std::array<Vector, 2>> orthonormal_pairs;
};

namespace detail {

/// Random g-unit spatial vector g-orthogonal to `against`; the squared norm
/// must stay away from zero so mixed-signature slices do not blow up.
inline Vector random_unit_orthogonal(const AdaptedFrame& frame, const std::vector<Vector>& against, Rng& rng) {
  for (;;) {
    Vector v = random_spatial(frame.dim(), rng);
    for (const auto& a : against) v -= frame_inner(frame, a, v) / frame_inner(frame, a, a) * a;
    const double vv = frame_inner(frame, v, v);
    if (std::abs(vv) > 0.05) return v / std::sqrt(std::abs(vv));
  }
}

}  // namespace detail

inline ProbeSet make_probes(const AdaptedFrame& frame, int extra, std::uint64_t seed) {
  const int n = frame.dim();
  Rng rng(seed);
  ProbeSet p;
  for (int i = 1; i < n; ++i) p.singles.push_back(Vector::Unit(n, i));
  for (int k = 0; k < extra; ++k) p.singles.push_back(detail::random_spatial(n, rng));
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) {
      p.pairs.push_back({Vector::Unit(n, i), Vector::Unit(n, j)});
      if (i != j) p.orthonormal_pairs.push_back({Vector::Unit(n, i), Vector::Unit(n, j)});
      for (int k = 1; k < n; ++k) p.triples.push_back({Vector::Unit(n, i), Vector::Unit(n, j), Vector::Unit(n, k)});
    }
  for (int k = 0; k < extra; ++k) p.pairs.push_back({detail::random_spatial(n, rng), detail::random_spatial(n, rng)});
  for (int k = 0; k < extra; ++k)
    p.triples.push_back(
        {detail::random_spatial(n, rng), detail::random_spatial(n, rng), detail::random_spatial(n, rng)});
  for (int k = 0; k < extra; ++k) {
    const Vector x = detail::random_unit_orthogonal(frame, {}, rng);
    p.orthonormal_pairs.push_back({x, detail::random_unit_orthogonal(frame, {x}, rng)});
  }
  return p;
}

/// eq13, eq14, a43, a44, skewA1 relative to 1 + max |R_{abcd}|.
inline void isotropy_residuals(const FrameCurvature& rf, const AdaptedFrame& frame, const Invariants& inv,
                               const ProbeSet& probes, Residuals& out) {
  const int n = frame.dim();
  const Vector u = Vector::Unit(n, 0);
  const double scale = frame_scale(rf);
  const double ef = inv.epsilon * inv.f;
  double eq13 = 0, eq14 = 0, a43 = 0, a44 = 0, skew = 0;

  for (const auto& x : probes.singles) {
    const Vector r = detail::riemann_lowered(rf, x, u, u) - inv.f * detail::lowered(frame, x);
    eq13 = std::max(eq13, r.norm());
  }
  for (const auto& [x, y] : probes.pairs) {
    a43 = std::max(a43, detail::riemann_lowered(rf, x, y, u).norm());
    const Vector rxuy = detail::riemann_lowered(rf, x, u, y);
    const Vector a = rxuy + ef * detail::frame_inner(frame, x, y) * detail::lowered(frame, u);
    a44 = std::max(a44, a.norm());
  }
  for (const auto& [x, y] : probes.orthonormal_pairs)
    skew = std::max(skew, (detail::riemann_lowered(rf, x, u, y) + detail::riemann_lowered(rf, y, u, x)).norm());
  for (const auto& [x, y, z] : probes.triples) {
    const Vector expect =
        inv.h * (detail::frame_inner(frame, y, z) * detail::lowered(frame, x) -
                 detail::frame_inner(frame, x, z) * detail::lowered(frame, y));
    eq14 = std::max(eq14, (detail::riemann_lowered(rf, x, y, z) - expect).norm());
  }
  out[Check::eq13] = eq13 / scale;
  out[Check::eq14] = eq14 / scale;
  out[Check::a43] = a43 / scale;
  out[Check::a44] = a44 / scale;
  out[Check::skewA1] = skew / scale;
}

/// Frame-independent f and h as jets, from Ricci contractions:
///   f = Ric(u,u)/(n−1),   h = (Scal − 2ε Ric(u,u)) / ((n−1)(n−2)).
struct TraceInvariants {
  Jet1 f;
  Jet1 h;
};

inline TraceInvariants trace_invariants(const PointGeometry& geom, const ObserverField& obs) {
  const int n = geom.dim;
  const Jet1 zero = Jet1::constant(0.0, n);
  Tensor<Jet1, 2> ric(n, zero);
  for (int s = 0; s < n; ++s)
    for (int v = 0; v < n; ++v) {
      Jet1 acc = zero;
      for (int m = 0; m < n; ++m)
        for (int r = 0; r < n; ++r) acc += geom.g_inv(m, r) * geom.riemann_low(r, s, m, v);
      ric(s, v) = acc;
    }
  Jet1 ruu = zero, scal = zero;
  for (int s = 0; s < n; ++s)
    for (int v = 0; v < n; ++v) {
      ruu += ric(s, v) * obs.u[s] * obs.u[v];
      scal += geom.g_inv(s, v) * ric(s, v);
    }
  TraceInvariants t;
  t.f = ruu / static_cast<double>(n - 1);
  t.h = (scal - 2.0 * obs.epsilon * ruu) / static_cast<double>((n - 1) * (n - 2));
  return t;
}

/// Everything known at a sample point.
struct PointAnalysis {
  PointGeometry geom;
  ObserverField obs;
  AdaptedFrame frame;
  FrameCurvature rf;
  Invariants inv;
  TraceInvariants trace;
  double scale = 1.0;  // 1 + max |R_{abcd}|

  double nondegeneracy() const { return trace.h.value() - inv.epsilon * trace.f.value(); }
  /// h − εf as a jet (carries its differential).
  Jet1 nondegeneracy_jet() const { return trace.h - static_cast<double>(inv.epsilon) * trace.f; }
  /// dF(V) for a coordinate vector V.
  static double differential(const Jet1& j, const Vector& v) {
    double s = 0.0;
    for (int i = 0; i < v.size(); ++i) s += j.grad(i) * v[i];
    return s;
  }
  /// ∂_t = ε u / (h − εf), the time-flow field.
  Vector time_field() const { return (inv.epsilon / nondegeneracy()) * obs.u_value; }
};

inline PointAnalysis analyze_point(const ChartSpec& chart, std::span<const double> point, std::uint64_t frame_seed) {
  if (chart.dim < 4) throw Error(ErrorKind::dimension, "the RW characterization needs dim >= 4");
  PointAnalysis pa{geometry_at(chart, point), {}, {}, {}, {}, {}, 1.0};
  pa.obs = observer_at(chart, pa.geom);
  if (!chart.options.normalize_u && std::abs(std::abs(pa.obs.raw_norm) - 1.0) > 1e-8)
    throw Error(ErrorKind::precondition,
                "u is not unit: g(u,u) = " + std::to_string(pa.obs.raw_norm) + " (set options.normalize_u)");
  pa.frame = adapted_frame(pa.geom, pa.obs.u_value, frame_seed);
  pa.rf = frame_curvature(pa.geom, pa.frame);
  pa.scale = frame_scale(pa.rf);
  pa.inv = extract_invariants(pa.rf, pa.frame);
  pa.trace = trace_invariants(pa.geom, pa.obs);
  return pa;
}

/// bianchi31/32/33, shear, closedness, geodesy relative to 1 + max |R_{abcd}|.
inline void structure_residuals(const PointAnalysis& pa, const ProbeSet& probes, double tol_margin,
                                Residuals& out) {
  const int n = pa.geom.dim;
  const Matrix& E = pa.frame.vectors;
  const Matrix& G = pa.geom.g_value;
  // M(a,b) = g(∇_{e_a} u, e_b)
  const Matrix M = E.transpose() * pa.obs.nabla * G * E;
  const Vector acc_low = E.transpose() * G * pa.obs.acceleration;
  Vector df(n), dh(n);
  for (int i = 0; i < n; ++i) {
    df[i] = pa.trace.f.grad(i);
    dh[i] = pa.trace.h.grad(i);
  }
  const Vector df_frame = E.transpose() * df;
  const Vector dh_frame = E.transpose() * dh;
  const double nd = pa.nondegeneracy();

  double b31 = 0, b32 = 0, b33 = 0, shear = 0;
  for (const auto& x : probes.singles) {
    b31 = std::max(b31, std::abs(df_frame.dot(x) + nd * acc_low.dot(x)));
    b33 = std::max(b33, std::abs(dh_frame.dot(x)));
  }
  const double coefficient = dh_frame[0] / (2.0 * nd);
  for (const auto& [x, y] : probes.pairs) {
    const double xy = x.dot(M * y);  // g(∇_x u, y)
    const double yx = y.dot(M * x);
    b32 = std::max(b32, std::abs(xy - yx));
    shear = std::max(shear, std::abs(yx + coefficient * detail::frame_inner(pa.frame, x, y)));
  }

  // ω_ν = (h − εf) g_{νλ} u^λ
  const Jet1 w = pa.nondegeneracy_jet();
  std::vector<Jet1> omega;
  for (int v = 0; v < n; ++v) {
    Jet1 acc = Jet1::constant(0.0, n);
    for (int l = 0; l < n; ++l) acc += pa.geom.g(v, l) * pa.obs.u[l];
    omega.push_back(w * acc);
  }
  double closed = 0.0;
  for (int m = 0; m < n; ++m)
    for (int v = m + 1; v < n; ++v) closed = std::max(closed, std::abs(omega[v].grad(m) - omega[m].grad(v)));

  const double s = pa.scale;
  out[Check::bianchi31] = b31 / s;
  out[Check::bianchi32] = b32 / s;
  out[Check::bianchi33] = b33 / s;
  if (std::abs(nd) > tol_margin) out[Check::shear] = shear / s;
  out[Check::closedness] = closed / s;
  out[Check::geodesy] = acc_low.norm() / s;
}

/// max |R_{abcd} − h (η_{ac}η_{bd} − η_{ad}η_{bc})| / (1 + max |R_{abcd}|)
inline double constant_curvature_residual(const FrameCurvature& rf, const AdaptedFrame& frame, double h) {
  const int n = frame.dim();
  double m = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double model = h * ((a == c && b == d ? frame.eta[a] * frame.eta[b] : 0.0) -
                                    (a == d && b == c ? frame.eta[a] * frame.eta[b] : 0.0));
          m = std::max(m, std::abs(rf(a, b, c, d) - model));
        }
  return m / frame_scale(rf);
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

struct CertifyConfig {
  int samples = 64;
  std::uint64_t seed = 0;
  double tol_pass = 1e-7;
  double tol_margin = 1e-6;
  int threads = 1;
  int probes = 16;
};

struct IsotropySample {
  std::vector<double> point;
  bool ok = false;
  std::string failure;
  int epsilon = 1;
  double f = 0.0;
  double h = 0.0;
  double nondegeneracy = 0.0;  // |h − εf|
  double constant_curvature = 0.0;
  Residuals residuals;
};

inline IsotropySample evaluate_sample(const ChartSpec& chart, std::span<const double> point, std::uint64_t seed,
                                      const CertifyConfig& config) {
  IsotropySample s;
  s.point.assign(point.begin(), point.end());
  try {
    const PointAnalysis pa = analyze_point(chart, point, seed);
    const ProbeSet probes = make_probes(pa.frame, config.probes, mix_seed(seed, 1));
    s.epsilon = pa.inv.epsilon;
    s.f = pa.inv.f;
    s.h = pa.inv.h;
    s.nondegeneracy = pa.inv.margin();
    isotropy_residuals(pa.rf, pa.frame, pa.inv, probes, s.residuals);
    structure_residuals(pa, probes, config.tol_margin, s.residuals);
    s.constant_curvature = constant_curvature_residual(pa.rf, pa.frame, pa.inv.h);
    for (const auto& v : s.residuals.values)
      if (v && !std::isfinite(*v)) throw Error(ErrorKind::degenerate, "non-finite residual");
    s.ok = true;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::dimension) throw;
    s.failure = e.what();
  }
  return s;
}

struct Certificate {
  std::string chart_name;
  std::string chart_hash;
  Classification classification = Classification::Degenerate;
  Residuals max_residuals;
  double min_nondegeneracy = 0.0;
  double max_nondegeneracy = 0.0;
  double max_constant_curvature = 0.0;
  double tol_pass = 0.0;
  double tol_margin = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::string tool_version{kToolVersion};
  std::vector<std::string> notes;
  std::vector<IsotropySample> sample_data;
};

inline std::vector<std::vector<double>> sample_points(const ChartSpec& chart, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> pts(count, std::vector<double>(chart.dim));
  for (auto& p : pts)
    for (int i = 0; i < chart.dim; ++i) p[i] = rng.uniform(chart.domain[i].lo, chart.domain[i].hi);
  return pts;
}

inline std::string format_point(std::span<const double> p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += format_number(p[i]);
  }
  return s + ")";
}

/// Evaluate `count` independent jobs on up to `threads` workers; results are
/// stored by index so the outcome does not depend on scheduling.
template <class Fn>
auto parallel_indexed(int count, int threads, Fn&& fn) {
  using R = decltype(fn(0));
  std::vector<R> results(count);
  std::vector<std::exception_ptr> errors(count);
  auto work = [&](int begin, int stride) {
    for (int i = begin; i < count; i += stride) {
      try {
        results[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, std::max(1, count));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work, t, workers);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

inline Certificate certify(const ChartSpec& chart, const CertifyConfig& config) {
  if (chart.dim < 4) throw Error(ErrorKind::dimension, "certification needs dim >= 4 (chart has dim " +
                                                           std::to_string(chart.dim) + ")");
  if (config.samples < 1) throw Error(ErrorKind::format, "sample count must be at least 1");

  const auto points = sample_points(chart, config.samples, config.seed);
  Certificate cert;
  cert.chart_name = chart.name;
  cert.chart_hash = chart.content_hash;
  cert.tol_pass = config.tol_pass;
  cert.tol_margin = config.tol_margin;
  cert.samples = config.samples;
  cert.seed = config.seed;
  cert.sample_data = parallel_indexed(config.samples, config.threads, [&](int i) {
    return evaluate_sample(chart, points[i], mix_seed(config.seed, static_cast<std::uint64_t>(i)), config);
  });

  bool any_failed = false;
  cert.min_nondegeneracy = INFINITY;
  for (const auto& s : cert.sample_data) {
    if (!s.ok) {
      if (!any_failed) cert.notes.push_back("precondition failed at " + format_point(s.point) + ": " + s.failure);
      any_failed = true;
      continue;
    }
    for (int c = 0; c < kCheckCount; ++c) {
      const auto& v = s.residuals.values[c];
      if (!v) continue;
      auto& m = cert.max_residuals.values[c];
      m = m ? std::max(*m, *v) : *v;
    }
    cert.min_nondegeneracy = std::min(cert.min_nondegeneracy, s.nondegeneracy);
    cert.max_nondegeneracy = std::max(cert.max_nondegeneracy, s.nondegeneracy);
    cert.max_constant_curvature = std::max(cert.max_constant_curvature, s.constant_curvature);
  }
  if (!std::isfinite(cert.min_nondegeneracy)) cert.min_nondegeneracy = 0.0;

  if (any_failed) {
    cert.classification = Classification::Degenerate;
    return cert;
  }
  std::vector<std::string> failing;
  for (auto c : kAllChecks) {
    const auto& v = cert.max_residuals[c];
    if (v && !(*v < config.tol_pass)) failing.push_back(to_string(c));
  }
  if (!failing.empty()) {
    std::string note = "residuals above tolerance:";
    for (const auto& f : failing) note += " " + f;
    cert.notes.push_back(note);
    cert.classification = Classification::NotIsotropic;
    return cert;
  }
  if (cert.max_nondegeneracy < config.tol_margin && cert.max_constant_curvature < config.tol_pass) {
    cert.classification = Classification::ConstantCurvature;
    cert.notes.push_back("h - eps*f vanishes at every sample: constant curvature");
    return cert;
  }
  if (cert.min_nondegeneracy > config.tol_margin) {
    cert.classification = Classification::LocallyRW;
    return cert;
  }
  cert.classification = Classification::Degenerate;
  for (const auto& s : cert.sample_data)
    if (s.nondegeneracy <= config.tol_margin)
      cert.notes.push_back("|h - eps*f| = " + format_number(s.nondegeneracy) + " within margin at " +
                           format_point(s.point));
  return cert;
}

}  // namespace rwcert
