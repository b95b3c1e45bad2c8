#pragma once

// Independent reference computations for the test suites: a random
// expression generator with its own plain-double evaluator, finite
// differences with Richardson extrapolation, and closed-form curvature of
// warped products and Schwarzschild.

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Random expression trees
// ---------------------------------------------------------------------------

enum class Op { constant, variable, neg, add, sub, mul, div, ipow, rpow, sin, cos, tan, sinh, cosh, tanh, exp, ln, sqrt };

struct Node {
  Op op = Op::constant;
  double value = 0.0;  // constant, or exponent for powers
  int var = 0;
  std::unique_ptr<Node> a, b;
};

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return x < 0 ? "(" + std::string(buf) + ")" : buf;
}

inline std::string render(const Node& n, const std::vector<std::string>& names) {
  auto un = [&](const char* f) { return std::string(f) + "(" + render(*n.a, names) + ")"; };
  auto bin = [&](const char* o) { return "(" + render(*n.a, names) + o + render(*n.b, names) + ")"; };
  switch (n.op) {
    case Op::constant: return num(n.value);
    case Op::variable: return names[n.var];
    case Op::neg: return "(-" + render(*n.a, names) + ")";
    case Op::add: return bin(" + ");
    case Op::sub: return bin(" - ");
    case Op::mul: return bin(" * ");
    case Op::div: return bin(" / ");
    case Op::ipow:
    case Op::rpow: return "(" + render(*n.a, names) + ")^" + num(n.value);
    case Op::sin: return un("sin");
    case Op::cos: return un("cos");
    case Op::tan: return un("tan");
    case Op::sinh: return un("sinh");
    case Op::cosh: return un("cosh");
    case Op::tanh: return un("tanh");
    case Op::exp: return un("exp");
    case Op::ln: return un("ln");
    case Op::sqrt: return un("sqrt");
  }
  return "0";
}

inline double eval_op(const Node& n, const std::vector<double>& x, double& margin, double& peak);

/// Plain evaluation. `margin` shrinks to the smallest distance from a
/// singularity seen on the way (division, ln, sqrt, tan, real powers);
/// `peak` grows to the largest intermediate magnitude.
inline double eval(const Node& n, const std::vector<double>& x, double& margin, double& peak) {
  const double r = [&] {
    switch (n.op) {
      case Op::constant: return n.value;
      case Op::variable: return x[n.var];
      default: break;
    }
    return eval_op(n, x, margin, peak);
  }();
  peak = std::max(peak, std::abs(r));
  return r;
}

inline double eval(const Node& n, const std::vector<double>& x, double& margin) {
  double peak = 0.0;
  return eval(n, x, margin, peak);
}

inline double eval_op(const Node& n, const std::vector<double>& x, double& margin, double& peak) {
  const double a = eval(*n.a, x, margin, peak);
  switch (n.op) {
    case Op::neg: return -a;
    case Op::sin: return std::sin(a);
    case Op::cos: return std::cos(a);
    case Op::tan: margin = std::min(margin, std::abs(std::cos(a))); return std::tan(a);
    case Op::sinh: return std::sinh(a);
    case Op::cosh: return std::cosh(a);
    case Op::tanh: return std::tanh(a);
    case Op::exp: return std::exp(a);
    case Op::ln: margin = std::min(margin, a); return std::log(a);
    case Op::sqrt: margin = std::min(margin, a); return std::sqrt(a);
    case Op::ipow: return std::pow(a, n.value);
    case Op::rpow: margin = std::min(margin, a); return std::pow(a, n.value);
    default: break;
  }
  const double b = eval(*n.b, x, margin, peak);
  switch (n.op) {
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::div: margin = std::min(margin, std::abs(b)); return a / b;
    default: return 0.0;
  }
}

inline std::unique_ptr<Node> random_tree(std::mt19937_64& rng, int depth, int dim) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto node = std::make_unique<Node>();
  if (depth == 0 || u01(rng) < 0.25) {
    if (u01(rng) < 0.35) {
      node->op = Op::constant;
      node->value = std::round((u01(rng) * 4.0 - 2.0) * 100.0) / 100.0;
    } else {
      node->op = Op::variable;
      node->var = static_cast<int>(rng() % static_cast<unsigned>(dim));
    }
    return node;
  }
  static constexpr Op kOps[] = {Op::neg,  Op::add,  Op::sub,  Op::mul,  Op::div,  Op::ipow, Op::rpow,
                                Op::sin,  Op::cos,  Op::tan,  Op::sinh, Op::cosh, Op::tanh, Op::exp,
                                Op::ln,   Op::sqrt, Op::add,  Op::mul};
  node->op = kOps[rng() % std::size(kOps)];
  node->a = random_tree(rng, depth - 1, dim);
  switch (node->op) {
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: node->b = random_tree(rng, depth - 1, dim); break;
    case Op::ipow: node->value = static_cast<double>(1 + rng() % 3); break;
    case Op::rpow: node->value = 0.5 + std::round(u01(rng) * 20.0) / 10.0; break;
    default: break;
  }
  return node;
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

using Scalar = std::function<double(const std::vector<double>&)>;

/// Nested central difference for ∂_{idx[0]} … ∂_{idx[k-1]} f with step h.
inline double central(const Scalar& f, std::vector<double> x, const std::vector<int>& idx, double h,
                      std::size_t level = 0) {
  if (level == idx.size()) return f(x);
  const int i = idx[level];
  const double x0 = x[i];
  x[i] = x0 + h;
  const double up = central(f, x, idx, h, level + 1);
  x[i] = x0 - h;
  const double down = central(f, x, idx, h, level + 1);
  return (up - down) / (2.0 * h);
}

/// Central differences with one Richardson step: error O(h⁴).
inline double richardson(const Scalar& f, const std::vector<double>& x, const std::vector<int>& idx, double h) {
  const double coarse = central(f, x, idx, h);
  const double fine = central(f, x, idx, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

/// Two Richardson steps over h, h/2, h/4: error O(h⁶).
inline double richardson2(const Scalar& f, const std::vector<double>& x, const std::vector<int>& idx, double h) {
  const double d1 = central(f, x, idx, h), d2 = central(f, x, idx, 0.5 * h), d4 = central(f, x, idx, 0.25 * h);
  const double r1 = (4.0 * d2 - d1) / 3.0, r2 = (4.0 * d4 - d2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

/// Step tuned to the derivative order: roundoff grows like h^-order.
inline double step_for_order(int order) { return 0.01 * order; }

/// Richardson estimate at the order's step, accepted only when halving the
/// step agrees to `agree` relative; nullopt when the difference table is
/// not converged (the function varies too fast for these steps).
inline std::optional<double> converged_derivative(const Scalar& f, const std::vector<double>& x,
                                                  const std::vector<int>& idx, double agree = 1e-7) {
  const double h = step_for_order(static_cast<int>(idx.size()));
  const double coarse = richardson2(f, x, idx, h);
  const double fine = richardson2(f, x, idx, 0.5 * h);
  if (std::abs(coarse - fine) > agree * std::max(1.0, std::abs(fine))) return std::nullopt;
  return fine;
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

// ---------------------------------------------------------------------------
// Closed-form curvature
// ---------------------------------------------------------------------------

/// g = ε dt² + a(t)² σ with σ of constant curvature k. Under
/// R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z:
///   f = −ä/a,   h = (k − ε ȧ²)/a²,   K_slice = k/a²,   II coefficient ȧ/a.
struct Warped {
  int epsilon = -1;
  double k = 0.0;
  std::function<double(double)> a, da, dda;

  double f(double t) const { return -dda(t) / a(t); }
  double h(double t) const { return (k - epsilon * da(t) * da(t)) / (a(t) * a(t)); }
  double dh(double t) const {
    // d/dt of (k − ε ȧ²) a⁻²
    const double A = a(t), dA = da(t), ddA = dda(t);
    return (-2.0 * epsilon * dA * ddA) / (A * A) - 2.0 * (k - epsilon * dA * dA) * dA / (A * A * A);
  }
  double hubble(double t) const { return da(t) / a(t); }
  double slice_curvature(double t) const { return k / (a(t) * a(t)); }
};

inline Warped warped_for(const std::string& id) {
  Warped w;
  if (id == "flrw_flat_linear") {
    w.a = [](double t) { return t; };
    w.da = [](double) { return 1.0; };
    w.dda = [](double) { return 0.0; };
  } else if (id == "flrw_closed_osc") {
    w.k = 1.0;
    w.a = [](double t) { return 2.0 + 0.5 * std::cos(t); };
    w.da = [](double t) { return -0.5 * std::sin(t); };
    w.dda = [](double t) { return -0.5 * std::cos(t); };
  } else if (id == "flrw_open") {
    w.k = -1.0;
    w.a = [](double t) { return t * t; };
    w.da = [](double t) { return 2.0 * t; };
    w.dda = [](double) { return 2.0; };
  } else if (id == "einstein_static") {
    w.k = 1.0;
    w.a = [](double) { return 2.0; };
    w.da = [](double) { return 0.0; };
    w.dda = [](double) { return 0.0; };
  } else if (id == "riemannian_grw") {
    w.epsilon = 1;
    w.a = [](double r) { return 1.0 + r * r; };
    w.da = [](double r) { return 2.0 * r; };
    w.dda = [](double) { return 2.0; };
  } else if (id == "desitter_flat") {
    w.a = [](double t) { return std::exp(t); };
    w.da = [](double t) { return std::exp(t); };
    w.dda = [](double t) { return std::exp(t); };
  } else {  // minkowski
    w.a = [](double) { return 1.0; };
    w.da = [](double) { return 0.0; };
    w.dda = [](double) { return 0.0; };
  }
  return w;
}

/// Static observer in Schwarzschild: g(R(e,u)u, e) for unit radial and
/// tangential e, and the observer's acceleration magnitude.
struct Schwarzschild {
  double M = 1.0;
  double radial_tidal(double r) const { return -2.0 * M / (r * r * r); }
  double tangential_tidal(double r) const { return M / (r * r * r); }
  double acceleration(double r) const { return M / (r * r * std::sqrt(1.0 - 2.0 * M / r)); }
};

}  // namespace oracle
