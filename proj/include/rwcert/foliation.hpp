#pragma once

// Reconstruction of the warped-product normal form  ε dt² + a(t)² σ  for a
// chart certified LocallyRW. The time function comes from the closed 1-form
// ω = (h − εf) u♭, the flow field is ∂_t = ε u / (h − εf) so that dt(∂_t) = 1,
// and the scale factor from  d ln a² / dτ = ψ = −∂_t h / (h − εf).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rwcert/chart.hpp"
#include "rwcert/error.hpp"
#include "rwcert/geometry.hpp"
#include "rwcert/isotropy.hpp"
#include "rwcert/random.hpp"

namespace rwcert {

inline constexpr double kQuadratureTol = 1e-10;
inline constexpr double kFlowTol = 1e-8;
inline constexpr double kSliceTol = 1e-9;
inline constexpr double kFlatBand = 1e-6;

/// Gauss–Legendre nodes and weights on [−1, 1].
template <int N>
std::array<std::array<double, 2>, N> gauss_legendre() {
  std::array<std::array<double, 2>, N> out{};
  for (int i = 0; i < N; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (N + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= N; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = N * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    out[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
  }
  return out;
}

struct FoliationSample {
  double tau = 0.0;
  std::vector<double> point;
  double a = 1.0;
  double k_tau = 0.0;
  double k_hat = 0.0;
  double psi = 0.0;
  double proper_time = 0.0;
  double a_normal = 1.0;  // a rescaled so that the spatial curvature is -1, 0 or 1
};

struct FoliationResult {
  std::vector<double> base;
  int epsilon = 1;
  std::vector<FoliationSample> samples;
  double loop_residual = 0.0;
  double k_hat_spread = 0.0;  // max |k̂ − k̂(0)| / (1 + |k̂(0)|)
  int curvature_sign = 0;
  double normal_scale = 1.0;  // |k̂|^(-1/2), or 1 for flat slices
  double quadrature_tol = kQuadratureTol;
  double flow_tol = kFlowTol;
};

struct SecondFundamentalForm {
  double coefficient = 0.0;  // II(x,y) = coefficient · g(x,y) · u
  double residual = 0.0;
};

class Foliation {
 public:
  /// Local quantities with their first derivatives at one point.
  struct Local {
    Vector point;
    int epsilon = 1;
    double f = 0.0;
    double h = 0.0;
    double nondegeneracy = 0.0;  // h − εf
    Vector u;
    Vector omega;     // ω_μ
    Vector dh;        // ∂_μ h
    Vector flow;      // ∂_t
    double psi = 0.0;
    double coefficient = 0.0;  // ε dh(u) / (2(h − εf))
    double k_tau = 0.0;
  };

  Foliation(const ChartSpec& chart, const Certificate& certificate)
      : chart_(chart), tol_margin_(certificate.tol_margin) {
    if (certificate.classification != Classification::LocallyRW)
      throw Error(ErrorKind::classification,
                  std::string(to_string(certificate.classification)) + ": foliation not applicable");
    if (certificate.chart_hash != chart.content_hash)
      throw Error(ErrorKind::classification, "certificate belongs to a different chart");
  }

  const ChartSpec& chart() const { return chart_; }

  Local local(std::span<const double> point) const {
    const PointGeometry geom = geometry_at(chart_, point);
    const ObserverField obs = observer_at(chart_, geom);
    const TraceInvariants tr = trace_invariants(geom, obs);
    const int n = chart_.dim;
    Local l;
    l.point = Eigen::Map<const Vector>(point.data(), n);
    l.epsilon = obs.epsilon;
    l.f = tr.f.value();
    l.h = tr.h.value();
    l.nondegeneracy = l.h - l.epsilon * l.f;
    if (!(std::abs(l.nondegeneracy) > tol_margin_))
      throw Error(ErrorKind::degenerate,
                  "|h - eps*f| = " + format_number(std::abs(l.nondegeneracy)) + " at " + format_point(point));
    l.u = obs.u_value;
    l.omega = l.nondegeneracy * (geom.g_value * l.u);
    l.dh = Vector(n);
    for (int i = 0; i < n; ++i) l.dh[i] = tr.h.grad(i);
    l.flow = (l.epsilon / l.nondegeneracy) * l.u;
    const double dh_u = l.dh.dot(l.u);
    l.psi = -l.dh.dot(l.flow) / l.nondegeneracy;
    l.coefficient = l.epsilon * dh_u / (2.0 * l.nondegeneracy);
    const double c = dh_u / (2.0 * l.nondegeneracy);
    l.k_tau = l.h + l.epsilon * c * c;
    return l;
  }

  Vector omega_at(std::span<const double> point) const { return local(point).omega; }

  /// ∫ω along a polyline.
  double time_along(std::span<const std::vector<double>> path) const {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) total += segment_integral(path[i], path[i + 1]);
    return total;
  }

  /// t(p) with t(base) = 0, integrated along base → waypoints → p.
  double time_value(std::span<const double> p, std::span<const double> base,
                    std::span<const std::vector<double>> waypoints = {}) const {
    std::vector<std::vector<double>> path;
    path.emplace_back(base.begin(), base.end());
    for (const auto& w : waypoints) path.push_back(w);
    path.emplace_back(p.begin(), p.end());
    return time_along(path);
  }

  double loop_residual(std::span<const std::vector<double>> loop) const {
    if (loop.empty()) return 0.0;
    for (int i = 0; i < chart_.dim; ++i)
      if (std::abs(loop.front()[i] - loop.back()[i]) > 1e-12)
        throw Error(ErrorKind::format, "loop is not closed");
    return std::abs(time_along(loop));
  }

  SecondFundamentalForm second_fundamental_form_check(std::span<const double> point) const {
    const PointAnalysis pa = analyze_point(chart_, point, 0);
    const Local l = local(point);
    const Matrix& E = pa.frame.vectors;
    const Matrix M = E.transpose() * pa.obs.nabla * pa.geom.g_value * E;  // g(∇_{e_a} u, e_b)
    SecondFundamentalForm out;
    out.coefficient = l.coefficient;
    for (int a = 1; a < chart_.dim; ++a)
      for (int b = 1; b < chart_.dim; ++b) {
        const double second = -l.epsilon * M(b, a);  // ε g(∇_x y, u) = −ε g(y, ∇_x u)
        const double model = a == b ? out.coefficient * pa.frame.eta[a] : 0.0;
        out.residual = std::max(out.residual, std::abs(second - model));
      }
    out.residual /= pa.scale;
    return out;
  }

  double slice_curvature(std::span<const double> point) const { return local(point).k_tau; }

  /// Flow along ∂_t by `dtau` with RK4, halving the step until the endpoint
  /// moves less than the flow tolerance. Also returns ∫ψ and proper time.
  struct FlowState {
    Vector point;
    double log_a2 = 0.0;
    double proper_time = 0.0;
  };

  FlowState flow(std::span<const double> start, double dtau) const {
    const int base_sign = sign_of(local(start).nondegeneracy);
    auto run = [&](int steps) { return integrate(start, dtau, steps, base_sign); };
    int steps = std::max(4, static_cast<int>(std::ceil(std::abs(dtau) / 0.05)));
    FlowState prev = run(steps);
    for (int round = 0; round < 12; ++round) {
      steps *= 2;
      FlowState next = run(steps);
      const double change = std::max((next.point - prev.point).cwiseAbs().maxCoeff(),
                                     std::abs(std::exp(0.5 * next.log_a2) - std::exp(0.5 * prev.log_a2)));
      prev = next;
      if (change < kFlowTol) return prev;
    }
    throw Error(ErrorKind::integration, "flow did not converge under step halving");
  }

  FoliationResult scale_factor_profile(std::span<const double> base, std::span<const double> tau_grid) const {
    FoliationResult out;
    out.base.assign(base.begin(), base.end());
    const Local l0 = local(base);
    out.epsilon = l0.epsilon;
    for (double tau : tau_grid) {
      FoliationSample s;
      s.tau = tau;
      FlowState st{Eigen::Map<const Vector>(base.data(), chart_.dim), 0.0, 0.0};
      if (tau != 0.0) st = flow(base, tau);
      const Local l = local(std::span<const double>(st.point.data(), chart_.dim));
      s.point.assign(st.point.data(), st.point.data() + chart_.dim);
      s.a = std::exp(0.5 * st.log_a2);
      s.k_tau = l.k_tau;
      s.k_hat = l.k_tau * s.a * s.a;
      s.psi = l.psi;
      s.proper_time = st.proper_time;
      out.samples.push_back(std::move(s));
    }
    const double k0 = l0.k_tau;
    for (const auto& s : out.samples)
      out.k_hat_spread = std::max(out.k_hat_spread, std::abs(s.k_hat - k0) / (1.0 + std::abs(k0)));
    out.curvature_sign = std::abs(k0) < kFlatBand ? 0 : (k0 > 0 ? 1 : -1);
    out.normal_scale = out.curvature_sign == 0 ? 1.0 : 1.0 / std::sqrt(std::abs(k0));
    for (auto& s : out.samples) s.a_normal = s.a * out.normal_scale;
    out.loop_residual = loop_residual(default_loop(base));
    return out;
  }

  /// Points of the slice t = tau: random domain points are flowed by
  /// tau − t(q) and then polished by Newton steps along ∂_t.
  std::vector<std::vector<double>> same_slice_points(std::span<const double> base, double tau, int count,
                                                     std::uint64_t seed) const {
    Rng rng(seed);
    std::vector<std::vector<double>> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < count) {
      if (++attempts > 50 * count) throw Error(ErrorKind::integration, "slice leaves the chart domain");
      std::vector<double> q(chart_.dim);
      for (int i = 0; i < chart_.dim; ++i) q[i] = rng.uniform(chart_.domain[i].lo, chart_.domain[i].hi);
      try {
        for (int it = 0; it < 8; ++it) {
          const double miss = tau - time_value(q, base);
          if (std::abs(miss) < kSliceTol) {
            out.push_back(q);
            break;
          }
          const FlowState st = flow(q, miss);
          q.assign(st.point.data(), st.point.data() + chart_.dim);
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::precondition && e.kind() != ErrorKind::integration) throw;
      }
    }
    return out;
  }

 private:
  static int sign_of(double x) { return x < 0 ? -1 : 1; }

  double segment_integral(const std::vector<double>& p, const std::vector<double>& q) const {
    static const auto nodes = gauss_legendre<8>();
    const int n = chart_.dim;
    const Vector a = Eigen::Map<const Vector>(p.data(), n);
    const Vector b = Eigen::Map<const Vector>(q.data(), n);
    const Vector d = b - a;
    if (d.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    auto composite = [&](int pieces) {
      double sum = 0.0;
      for (int k = 0; k < pieces; ++k) {
        const double lo = static_cast<double>(k) / pieces, hi = static_cast<double>(k + 1) / pieces;
        for (const auto& [x, w] : nodes) {
          const double s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
          const Vector pt = a + s * d;
          sum += 0.5 * (hi - lo) * w * omega_at(std::span<const double>(pt.data(), n)).dot(d);
        }
      }
      return sum;
    };
    double prev = composite(1);
    for (int pieces = 2; pieces <= 1 << 10; pieces *= 2) {
      const double next = composite(pieces);
      if (std::abs(next - prev) < kQuadratureTol) return next;
      prev = next;
    }
    throw Error(ErrorKind::integration, "quadrature did not converge");
  }

  FlowState integrate(std::span<const double> start, double dtau, int steps, int base_sign) const {
    const int n = chart_.dim;
    const double hstep = dtau / steps;
    // state: x (n), ln a², proper time
    auto rhs = [&](const Vector& y) {
      const Local l = local(std::span<const double>(y.data(), n));
      if (sign_of(l.nondegeneracy) != base_sign)
        throw Error(ErrorKind::degenerate, "h - eps*f changes sign along the flow");
      Vector d(n + 2);
      d.head(n) = l.flow;
      d[n] = l.psi;
      d[n + 1] = 1.0 / std::abs(l.nondegeneracy);
      return d;
    };
    Vector y = Vector::Zero(n + 2);
    y.head(n) = Eigen::Map<const Vector>(start.data(), n);
    for (int i = 0; i < steps; ++i) {
      const Vector k1 = rhs(y);
      const Vector k2 = rhs(y + 0.5 * hstep * k1);
      const Vector k3 = rhs(y + 0.5 * hstep * k2);
      const Vector k4 = rhs(y + hstep * k3);
      y += hstep / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return {y.head(n), y[n], y[n + 1]};
  }

  // Small coordinate rectangle at `base` in the first two coordinates, kept
  // inside the domain.
  std::vector<std::vector<double>> default_loop(std::span<const double> base) const {
    std::vector<double> p(base.begin(), base.end());
    std::array<double, 2> side{};
    for (int i = 0; i < 2; ++i) {
      const auto& iv = chart_.domain[i];
      side[i] = 0.1 * iv.width();
      if (p[i] + side[i] > iv.hi) side[i] = -side[i];
      if (!iv.contains(p[i] + side[i])) side[i] = 0.0;
    }
    std::vector<std::vector<double>> loop(5, p);
    loop[1][0] += side[0];
    loop[2][0] += side[0];
    loop[2][1] += side[1];
    loop[3][1] += side[1];
    return loop;
  }

  ChartSpec chart_;
  double tol_margin_;
};

}  // namespace rwcert
