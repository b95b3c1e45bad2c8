#pragma once

// Pointwise semi-Riemannian geometry carried with first coordinate
// derivatives.
//
// Conventions:
//   Γ^k_{ij} = ½ g^{kρ}(∂_i g_{ρj} + ∂_j g_{ρi} − ∂_ρ g_{ij})
//   R(X,Y)Z  = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z
//   R^ρ_{σμν} = ∂_μΓ^ρ_{νσ} − ∂_νΓ^ρ_{μσ} + Γ^ρ_{μλ}Γ^λ_{νσ} − Γ^ρ_{νλ}Γ^λ_{μσ}
//   R_{ρσμν} = g_{ρα} R^α_{σμν},   g(R(X,Y)Z, W) = R_{ρσμν} W^ρ Z^σ X^μ Y^ν
//
// With signature (−,+,+,+) a FLRW chart gives f = −ä/a and h = (ȧ² + k)/a².

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rwcert/chart.hpp"
#include "rwcert/error.hpp"
#include "rwcert/jet.hpp"
#include "rwcert/random.hpp"
#include "rwcert/tensor.hpp"

namespace rwcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Evaluated geometry at one point. Every tensor entry is a Jet1 whose
/// gradient holds the coordinate partials of that component.
struct PointGeometry {
  std::vector<double> point;
  int dim = 0;
  Tensor<Jet1, 2> g;            // g_{μν}
  Tensor<Jet1, 2> g_inv;        // g^{μν}
  Tensor<Jet1, 3> gamma;        // Γ^k_{ij} as (k, i, j)
  Tensor<Jet1, 4> riemann;      // R^ρ_{σμν}
  Tensor<Jet1, 4> riemann_low;  // R_{ρσμν}
  Matrix g_value;
  Matrix g_inv_value;
  std::vector<int> signature;  // signs of the eigenvalues of g, ascending
  double riemann_max = 0.0;    // max |R_{ρσμν}|

  double inner(const Vector& v, const Vector& w) const { return v.dot(g_value * w); }

  /// R(X,Y)Z as a contravariant vector.
  Vector apply_riemann(const Vector& x, const Vector& y, const Vector& z) const {
    Vector out = Vector::Zero(dim);
    for (int r = 0; r < dim; ++r) {
      double acc = 0.0;
      for (int s = 0; s < dim; ++s) {
        if (z[s] == 0.0) continue;
        for (int m = 0; m < dim; ++m) {
          if (x[m] == 0.0) continue;
          for (int v = 0; v < dim; ++v) acc += riemann(r, s, m, v).value() * z[s] * x[m] * y[v];
        }
      }
      out[r] = acc;
    }
    return out;
  }

  /// 1 + max |R_{ρσμν}|: denominator for relative residuals.
  double curvature_scale() const { return 1.0 + riemann_max; }
};

namespace detail {

inline void check_point(const ChartSpec& chart, std::span<const double> point) {
  if (static_cast<int>(point.size()) != chart.dim)
    throw Error(ErrorKind::dimension, "point has " + std::to_string(point.size()) + " coordinates for dim " +
                                          std::to_string(chart.dim));
  for (int i = 0; i < chart.dim; ++i) {
    if (!std::isfinite(point[i]) || !chart.domain[i].contains(point[i]))
      throw Error(ErrorKind::precondition, "point coordinate " + chart.coords()[i] + " = " +
                                               std::to_string(point[i]) + " outside chart domain");
  }
}

/// |det g| / ∏ ‖row_i‖, in [0, 1]; invariant under rescaling coordinates.
inline double scaled_determinant(const Matrix& g) {
  double norms = 1.0;
  for (int i = 0; i < g.rows(); ++i) norms *= g.row(i).norm();
  if (norms == 0.0) return 0.0;
  return std::abs(g.determinant()) / norms;
}

inline void check_nondegenerate(const Matrix& g) {
  const double s = scaled_determinant(g);
  if (!(s > 1e-10))
    throw Error(ErrorKind::degenerate, "metric is degenerate at point (scaled |det g| = " + std::to_string(s) + ")");
}

inline std::vector<int> eigen_signs(const Matrix& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(g, Eigen::EigenvaluesOnly);
  std::vector<int> signs;
  for (int i = 0; i < g.rows(); ++i) signs.push_back(solver.eigenvalues()[i] < 0 ? -1 : 1);
  return signs;
}

inline Matrix values(const Tensor<Jet1, 2>& t) {
  Matrix m(t.dim(), t.dim());
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) m(i, j) = t(i, j).value();
  return m;
}

}  // namespace detail

/// Metric, inverse, Christoffel symbols and Riemann tensor at `point`.
inline PointGeometry geometry_at(const ChartSpec& chart, std::span<const double> point) {
  detail::check_point(chart, point);
  const int n = chart.dim;
  const auto env = seed_point<Jet3>(point);
  const auto g3 = eval_metric<Jet3>(chart, std::span<const Jet3>(env));
  const Jet1 zero = Jet1::constant(0.0, n);

  PointGeometry geom;
  geom.point.assign(point.begin(), point.end());
  geom.dim = n;
  geom.g = Tensor<Jet1, 2>(n, zero);
  Tensor<Jet1, 3> dg(n, zero);   // (a, μ, ν): ∂_a g_{μν}
  Tensor<Jet1, 4> ddg(n, zero);  // (a, b, μ, ν): ∂_a ∂_b g_{μν}
  for (int m = 0; m < n; ++m)
    for (int v = 0; v < n; ++v) {
      geom.g(m, v) = g3[m][v].to_jet1();
      for (int a = 0; a < n; ++a) {
        dg(a, m, v) = g3[m][v].partial(a);
        for (int b = 0; b < n; ++b) ddg(a, b, m, v) = g3[m][v].partial2(a, b);
      }
    }

  geom.g_value = detail::values(geom.g);
  detail::check_nondegenerate(geom.g_value);
  geom.g_inv_value = geom.g_value.inverse();
  geom.signature = detail::eigen_signs(geom.g_value);

  // g^{μν} with ∂_c g^{μν} = −(g⁻¹ ∂_c g g⁻¹)^{μν}
  geom.g_inv = Tensor<Jet1, 2>(n, zero);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) geom.g_inv(i, j) = Jet1::constant(geom.g_inv_value(i, j), n);
  for (int c = 0; c < n; ++c) {
    Matrix dgc(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dgc(i, j) = dg(c, i, j).value();
    const Matrix d = -geom.g_inv_value * dgc * geom.g_inv_value;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) geom.g_inv(i, j).grad(c) = d(i, j);
  }

  // ∂_a g^{μν} as jets (carries ∂_b ∂_a g^{μν} in the gradient)
  Tensor<Jet1, 3> dg_inv(n, zero);
  for (int a = 0; a < n; ++a) {
    Tensor<Jet1, 2> tmp(n, zero);  // g⁻¹ ∂_a g
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        Jet1 acc = zero;
        for (int k = 0; k < n; ++k) acc += geom.g_inv(i, k) * dg(a, k, l);
        tmp(i, l) = acc;
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet1 acc = zero;
        for (int l = 0; l < n; ++l) acc += tmp(i, l) * geom.g_inv(l, j);
        dg_inv(a, i, j) = -acc;
      }
  }

  // Christoffel symbols of the first kind and their partials
  Tensor<Jet1, 3> gamma1(n, zero);   // (ρ, μ, ν)
  Tensor<Jet1, 4> dgamma1(n, zero);  // (a, ρ, μ, ν)
  for (int r = 0; r < n; ++r)
    for (int m = 0; m < n; ++m)
      for (int v = 0; v < n; ++v) {
        gamma1(r, m, v) = 0.5 * (dg(m, r, v) + dg(v, r, m) - dg(r, m, v));
        for (int a = 0; a < n; ++a)
          dgamma1(a, r, m, v) = 0.5 * (ddg(a, m, r, v) + ddg(a, v, r, m) - ddg(a, r, m, v));
      }

  geom.gamma = Tensor<Jet1, 3>(n, zero);
  Tensor<Jet1, 4> dgamma(n, zero);  // (a, k, μ, ν): ∂_a Γ^k_{μν}
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m)
      for (int v = 0; v < n; ++v) {
        Jet1 acc = zero;
        for (int r = 0; r < n; ++r) acc += geom.g_inv(k, r) * gamma1(r, m, v);
        geom.gamma(k, m, v) = acc;
        for (int a = 0; a < n; ++a) {
          Jet1 d = zero;
          for (int r = 0; r < n; ++r) d += dg_inv(a, k, r) * gamma1(r, m, v) + geom.g_inv(k, r) * dgamma1(a, r, m, v);
          dgamma(a, k, m, v) = d;
        }
      }

  geom.riemann = Tensor<Jet1, 4>(n, zero);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int v = 0; v < n; ++v) {
          Jet1 acc = dgamma(m, r, v, s) - dgamma(v, r, m, s);
          for (int l = 0; l < n; ++l)
            acc += geom.gamma(r, m, l) * geom.gamma(l, v, s) - geom.gamma(r, v, l) * geom.gamma(l, m, s);
          geom.riemann(r, s, m, v) = acc;
        }

  geom.riemann_low = Tensor<Jet1, 4>(n, zero);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int v = 0; v < n; ++v) {
          Jet1 acc = zero;
          for (int a = 0; a < n; ++a) acc += geom.g(r, a) * geom.riemann(a, s, m, v);
          geom.riemann_low(r, s, m, v) = acc;
          geom.riemann_max = std::max(geom.riemann_max, std::abs(acc.value()));
        }
  return geom;
}

/// Metric and Christoffel values only (no curvature); used by integrators.
struct Connection {
  std::vector<double> point;
  int dim = 0;
  Tensor<Jet1, 2> g;
  Matrix g_value;
  Matrix g_inv_value;
  Tensor<double, 3> gamma;  // Γ^k_{ij}

  double inner(const Vector& v, const Vector& w) const { return v.dot(g_value * w); }

  /// Γ^k_{ij} v^i w^j
  Vector contract(const Vector& v, const Vector& w) const {
    Vector out = Vector::Zero(dim);
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) out[k] += gamma(k, i, j) * v[i] * w[j];
    return out;
  }
};

inline Connection connection_at(const ChartSpec& chart, std::span<const double> point) {
  detail::check_point(chart, point);
  const int n = chart.dim;
  const auto env = seed_point<Jet1>(point);
  const auto g1 = eval_metric<Jet1>(chart, std::span<const Jet1>(env));
  Connection c;
  c.point.assign(point.begin(), point.end());
  c.dim = n;
  c.g = Tensor<Jet1, 2>(n, Jet1::constant(0.0, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c.g(i, j) = g1[i][j];
  c.g_value = detail::values(c.g);
  detail::check_nondegenerate(c.g_value);
  c.g_inv_value = c.g_value.inverse();
  c.gamma = Tensor<double, 3>(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int r = 0; r < n; ++r)
          acc += c.g_inv_value(k, r) * 0.5 * (g1[r][j].grad(i) + g1[r][i].grad(j) - g1[i][j].grad(r));
        c.gamma(k, i, j) = acc;
      }
  return c;
}

inline Connection connection_of(const PointGeometry& geom) {
  Connection c;
  c.point = geom.point;
  c.dim = geom.dim;
  c.g = geom.g;
  c.g_value = geom.g_value;
  c.g_inv_value = geom.g_inv_value;
  c.gamma = Tensor<double, 3>(geom.dim, 0.0);
  for (int k = 0; k < geom.dim; ++k)
    for (int i = 0; i < geom.dim; ++i)
      for (int j = 0; j < geom.dim; ++j) c.gamma(k, i, j) = geom.gamma(k, i, j).value();
  return c;
}

// ---------------------------------------------------------------------------
// Algebraic identities (engine self-test)
// ---------------------------------------------------------------------------

struct IdentityResiduals {
  double inverse = 0.0;               // max |g g⁻¹ − I|
  double christoffel_symmetry = 0.0;  // max |Γ^k_{ij} − Γ^k_{ji}|
  double antisymmetry_first = 0.0;    // R_{ρσμν} + R_{σρμν}
  double antisymmetry_last = 0.0;     // R_{ρσμν} + R_{ρσνμ}
  double pair_exchange = 0.0;         // R_{ρσμν} − R_{μνρσ}
  double first_bianchi = 0.0;
  double second_bianchi = 0.0;
  double metric_compatibility = 0.0;
};

/// All residuals relative to 1 + max|R_{ρσμν}|, except metric compatibility
/// which is relative to 1 + max|∂g|.
inline IdentityResiduals identity_residuals(const PointGeometry& geom) {
  const int n = geom.dim;
  const auto& R = geom.riemann_low;
  const double scale = geom.curvature_scale();
  IdentityResiduals out;

  out.inverse = (geom.g_value * geom.g_inv_value - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.christoffel_symmetry =
            std::max(out.christoffel_symmetry, std::abs(geom.gamma(k, i, j).value() - geom.gamma(k, j, i).value()));

  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int v = 0; v < n; ++v) {
          const double x = R(r, s, m, v).value();
          out.antisymmetry_first = std::max(out.antisymmetry_first, std::abs(x + R(s, r, m, v).value()));
          out.antisymmetry_last = std::max(out.antisymmetry_last, std::abs(x + R(r, s, v, m).value()));
          out.pair_exchange = std::max(out.pair_exchange, std::abs(x - R(m, v, r, s).value()));
          out.first_bianchi =
              std::max(out.first_bianchi, std::abs(x + R(r, m, v, s).value() + R(r, v, s, m).value()));
        }

  // ∇_λ R_{ρσμν}
  Tensor<double, 5> nabla(n, 0.0);
  for (int l = 0; l < n; ++l)
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s)
        for (int m = 0; m < n; ++m)
          for (int v = 0; v < n; ++v) {
            double acc = R(r, s, m, v).grad(l);
            for (int a = 0; a < n; ++a) {
              acc -= geom.gamma(a, l, r).value() * R(a, s, m, v).value();
              acc -= geom.gamma(a, l, s).value() * R(r, a, m, v).value();
              acc -= geom.gamma(a, l, m).value() * R(r, s, a, v).value();
              acc -= geom.gamma(a, l, v).value() * R(r, s, m, a).value();
            }
            nabla(l, r, s, m, v) = acc;
          }
  for (int l = 0; l < n; ++l)
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s)
        for (int m = 0; m < n; ++m)
          for (int v = 0; v < n; ++v)
            out.second_bianchi = std::max(
                out.second_bianchi, std::abs(nabla(l, r, s, m, v) + nabla(m, r, s, v, l) + nabla(v, r, s, l, m)));

  double dg_max = 0.0;
  for (int l = 0; l < n; ++l)
    for (int m = 0; m < n; ++m)
      for (int v = 0; v < n; ++v) {
        double acc = geom.g(m, v).grad(l);
        dg_max = std::max(dg_max, std::abs(acc));
        for (int r = 0; r < n; ++r) {
          acc -= geom.gamma(r, l, m).value() * geom.g(r, v).value();
          acc -= geom.gamma(r, l, v).value() * geom.g(m, r).value();
        }
        out.metric_compatibility = std::max(out.metric_compatibility, std::abs(acc));
      }

  out.antisymmetry_first /= scale;
  out.antisymmetry_last /= scale;
  out.pair_exchange /= scale;
  out.first_bianchi /= scale;
  out.second_bianchi /= scale;
  out.metric_compatibility /= 1.0 + dg_max;
  return out;
}

// ---------------------------------------------------------------------------
// Sectional curvature
// ---------------------------------------------------------------------------

/// K(span{v, w}) = g(R(v,w)w, v) / (g(v,v)g(w,w) − g(v,w)²).
inline double sectional_curvature(const PointGeometry& geom, const Vector& v, const Vector& w) {
  const int n = geom.dim;
  const double gvv = geom.inner(v, v), gww = geom.inner(w, w), gvw = geom.inner(v, w);
  const double denom = gvv * gww - gvw * gvw;
  const Matrix absg = geom.g_value.cwiseAbs();
  const double scale = v.cwiseAbs().dot(absg * v.cwiseAbs()) * w.cwiseAbs().dot(absg * w.cwiseAbs());
  if (!(std::abs(denom) > 1e-10 * scale) || scale == 0.0)
    throw Error(ErrorKind::degenerate, "degenerate plane: g(v,v)g(w,w) - g(v,w)^2 = " + std::to_string(denom));
  double num = 0.0;
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int q = 0; q < n; ++q) num += geom.riemann_low(r, s, m, q).value() * v[r] * w[s] * v[m] * w[q];
  return num / denom;
}

// ---------------------------------------------------------------------------
// Distinguished vector field u
// ---------------------------------------------------------------------------

struct ObserverField {
  std::vector<Jet1> u;     // contravariant components (normalized if requested)
  Vector u_value;
  double raw_norm = 0.0;   // g(u,u) of the field as written in the chart
  int epsilon = 1;         // sign of g(u,u)
  Matrix nabla;            // nabla(μ, ν) = (∇_μ u)^ν
  Vector acceleration;     // ∇_u u
};

namespace detail {

template <class GammaValue>
ObserverField observer_impl(const ChartSpec& chart, std::span<const double> point, const Tensor<Jet1, 2>& g,
                            GammaValue&& gamma) {
  const int n = chart.dim;
  const auto env = seed_point<Jet1>(point);
  ObserverField obs;
  for (int i = 0; i < n; ++i)
    obs.u.push_back(eval_expr<Jet1>(chart.u[i], std::span<const Jet1>(env), chart.param_values));

  Jet1 norm = Jet1::constant(0.0, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) norm += g(a, b) * obs.u[a] * obs.u[b];
  obs.raw_norm = norm.value();
  if (norm.value() == 0.0) throw Error(ErrorKind::degenerate, "u is null at point");
  obs.epsilon = norm.value() < 0 ? -1 : 1;
  if (chart.options.normalize_u) {
    const Jet1 inv = divide(Jet1::constant(1.0, n), elementary(Elementary::sqrt, obs.epsilon * norm));
    for (auto& c : obs.u) c = c * inv;
  }

  obs.u_value = Vector(n);
  for (int i = 0; i < n; ++i) obs.u_value[i] = obs.u[i].value();
  obs.nabla = Matrix::Zero(n, n);
  for (int m = 0; m < n; ++m)
    for (int v = 0; v < n; ++v) {
      double acc = obs.u[v].grad(m);
      for (int l = 0; l < n; ++l) acc += gamma(v, m, l) * obs.u_value[l];
      obs.nabla(m, v) = acc;
    }
  obs.acceleration = obs.nabla.transpose() * obs.u_value;
  return obs;
}

}  // namespace detail

inline ObserverField observer_at(const ChartSpec& chart, const PointGeometry& geom) {
  return detail::observer_impl(chart, geom.point, geom.g,
                               [&](int k, int i, int j) { return geom.gamma(k, i, j).value(); });
}

inline ObserverField observer_at(const ChartSpec& chart, const Connection& conn) {
  return detail::observer_impl(chart, conn.point, conn.g, [&](int k, int i, int j) { return conn.gamma(k, i, j); });
}

struct CovariantDerivative {
  Matrix nabla_u;       // (∇_μ u)^ν
  Vector acceleration;  // ∇_u u
};

inline CovariantDerivative covariant_derivative_u(const ChartSpec& chart, std::span<const double> point) {
  const Connection conn = connection_at(chart, point);
  ObserverField obs = observer_at(chart, conn);
  return {std::move(obs.nabla), std::move(obs.acceleration)};
}

// ---------------------------------------------------------------------------
// Adapted orthonormal frame
// ---------------------------------------------------------------------------

struct AdaptedFrame {
  Matrix vectors;        // columns e_0 = u, e_1, ..., e_{n-1}
  std::vector<int> eta;  // g(e_a, e_a) = ±1
  int epsilon() const { return eta.front(); }
  int dim() const { return static_cast<int>(vectors.cols()); }
  Vector e(int a) const { return vectors.col(a); }
};

/// Gram–Schmidt completion of u into an orthonormal frame. Candidates are the
/// coordinate axes in seeded random order; a candidate is rejected when the
/// norm of its projection is below 1e-6, and missing vectors are then drawn as
/// random unit mixtures (up to 32 attempts each).
inline AdaptedFrame adapted_frame(const Matrix& g, const Vector& u, std::uint64_t seed) {
  const int n = static_cast<int>(g.rows());
  const double uu = u.dot(g * u);
  if (std::abs(std::abs(uu) - 1.0) > 1e-8)
    throw Error(ErrorKind::precondition, "u is not unit: g(u,u) = " + std::to_string(uu));

  AdaptedFrame frame;
  frame.vectors = Matrix::Zero(n, n);
  frame.vectors.col(0) = u;
  frame.eta.push_back(uu < 0 ? -1 : 1);
  int filled = 1;

  auto project = [&](Vector v) {
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < filled; ++k) {
        const Vector ek = frame.vectors.col(k);
        v -= frame.eta[k] * ek.dot(g * v) * ek;
      }
    return v;
  };
  auto try_accept = [&](const Vector& candidate) {
    const Vector v = project(candidate);
    const double vv = v.dot(g * v);
    if (std::abs(vv) < 1e-6) return false;
    frame.vectors.col(filled) = v / std::sqrt(std::abs(vv));
    frame.eta.push_back(vv < 0 ? -1 : 1);
    ++filled;
    return true;
  };

  Rng rng(seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  for (int axis : order) {
    if (filled == n) break;
    try_accept(Vector::Unit(n, axis));
  }
  while (filled < n) {
    bool ok = false;
    for (int attempt = 0; attempt < 32 && !ok; ++attempt) {
      Vector v(n);
      for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
      if (v.norm() < 1e-3) continue;
      ok = try_accept(v / v.norm());
    }
    if (!ok) throw Error(ErrorKind::degenerate, "Gram-Schmidt failed: no admissible pivot after 32 retries");
  }
  return frame;
}

inline AdaptedFrame adapted_frame(const PointGeometry& geom, const Vector& u, std::uint64_t seed) {
  return adapted_frame(geom.g_value, u, seed);
}

}  // namespace rwcert
