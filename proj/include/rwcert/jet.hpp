#pragma once

// Truncated multivariate Taylor arithmetic.
//
// Jet3 carries a value with every partial derivative up to third order in
// `dim` coordinates; Jet1 carries only the gradient. Both share the same
// elementary-function kernel (`taylor_coefficients` + `compose`), and plain
// doubles participate through the same overload set so the expression
// evaluator can be written once for all three scalar types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "rwcert/error.hpp"

namespace rwcert {

inline constexpr int kMaxDim = 8;

namespace detail {

constexpr int tri(int n) { return n * (n + 1) / 2; }
constexpr int tet(int n) { return n * (n + 1) * (n + 2) / 6; }

// Canonical packed layout, independent of the jet dimension: the entries for
// a d-dimensional jet are exactly the first tri(d) / tet(d) slots.
constexpr int hess_slot(int i, int j) { return tri(j) + i; }              // i <= j
constexpr int cube_slot(int i, int j, int k) { return tet(k) + tri(j) + i; }  // i <= j <= k

struct CubeEntry {
  int i, j, k;
  int ij, ik, jk;  // hessian slots of the index pairs
};

constexpr std::array<CubeEntry, tet(kMaxDim)> make_cube_table() {
  std::array<CubeEntry, tet(kMaxDim)> table{};
  for (int k = 0; k < kMaxDim; ++k)
    for (int j = 0; j <= k; ++j)
      for (int i = 0; i <= j; ++i)
        table[cube_slot(i, j, k)] = {i, j, k, hess_slot(i, j), hess_slot(i, k), hess_slot(j, k)};
  return table;
}

struct HessEntry {
  int i, j;
};

constexpr std::array<HessEntry, tri(kMaxDim)> make_hess_table() {
  std::array<HessEntry, tri(kMaxDim)> table{};
  for (int j = 0; j < kMaxDim; ++j)
    for (int i = 0; i <= j; ++i) table[hess_slot(i, j)] = {i, j};
  return table;
}

inline constexpr auto kCubeTable = make_cube_table();
inline constexpr auto kHessTable = make_hess_table();

inline void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw Error(ErrorKind::dimension,
                "jet dimension " + std::to_string(dim) + " outside [1, " + std::to_string(kMaxDim) + "]");
}

inline void check_same_dim(int a, int b) {
  if (a != b)
    throw Error(ErrorKind::dimension,
                "jet dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace detail

/// Elementary functions known to the jet kernel and the expression language.
enum class Elementary { sin, cos, tan, sinh, cosh, tanh, exp, ln, sqrt, pow_const };

inline const char* to_string(Elementary fn) noexcept {
  switch (fn) {
    case Elementary::sin: return "sin";
    case Elementary::cos: return "cos";
    case Elementary::tan: return "tan";
    case Elementary::sinh: return "sinh";
    case Elementary::cosh: return "cosh";
    case Elementary::tanh: return "tanh";
    case Elementary::exp: return "exp";
    case Elementary::ln: return "ln";
    case Elementary::sqrt: return "sqrt";
    case Elementary::pow_const: return "pow";
  }
  return "?";
}

/// f(x), f'(x), f''(x), f'''(x) of `fn` at `x`; throws DomainError outside the
/// real domain. `exponent` is only read for pow_const.
inline std::array<double, 4> taylor_coefficients(Elementary fn, double x, double exponent = 0.0) {
  switch (fn) {
    case Elementary::sin: {
      const double s = std::sin(x), c = std::cos(x);
      return {s, c, -s, -c};
    }
    case Elementary::cos: {
      const double s = std::sin(x), c = std::cos(x);
      return {c, -s, -c, s};
    }
    case Elementary::tan: {
      if (std::abs(std::cos(x)) < 1e-12) throw DomainError("tan", x, " (pole)");
      const double t = std::tan(x), sec2 = 1.0 + t * t;
      return {t, sec2, 2.0 * t * sec2, sec2 * (2.0 + 6.0 * t * t)};
    }
    case Elementary::sinh: {
      const double s = std::sinh(x), c = std::cosh(x);
      return {s, c, s, c};
    }
    case Elementary::cosh: {
      const double s = std::sinh(x), c = std::cosh(x);
      return {c, s, c, s};
    }
    case Elementary::tanh: {
      const double t = std::tanh(x), d = 1.0 - t * t;
      return {t, d, -2.0 * t * d, d * (6.0 * t * t - 2.0)};
    }
    case Elementary::exp: {
      const double e = std::exp(x);
      return {e, e, e, e};
    }
    case Elementary::ln: {
      if (!(x > 0.0)) throw DomainError("ln", x, " (requires value > 0)");
      const double r = 1.0 / x;
      return {std::log(x), r, -r * r, 2.0 * r * r * r};
    }
    case Elementary::sqrt: {
      if (!(x > 0.0)) throw DomainError("sqrt", x, " (requires value > 0)");
      const double s = std::sqrt(x);
      return {s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)};
    }
    case Elementary::pow_const: {
      if (!(x > 0.0)) throw DomainError("pow", x, " (non-integer exponent requires base > 0)");
      const double r = exponent;
      const double p = std::pow(x, r);
      return {p, r * p / x, r * (r - 1.0) * p / (x * x), r * (r - 1.0) * (r - 2.0) * p / (x * x * x)};
    }
  }
  return {0, 0, 0, 0};
}

// ---------------------------------------------------------------------------
// Jet1: value and gradient
// ---------------------------------------------------------------------------

class Jet1 {
 public:
  Jet1() = default;

  static Jet1 constant(double c, int dim) {
    detail::check_dim(dim);
    Jet1 j;
    j.dim_ = dim;
    j.value_ = c;
    return j;
  }

  static Jet1 variable(int index, double x0, int dim) {
    detail::check_dim(dim);
    if (index < 0 || index >= dim)
      throw Error(ErrorKind::dimension, "seed index " + std::to_string(index) + " out of range for dim " +
                                            std::to_string(dim));
    Jet1 j = constant(x0, dim);
    j.grad_[index] = 1.0;
    return j;
  }

  static Jet1 from(double value, const double* gradient, int dim) {
    Jet1 j = constant(value, dim);
    std::copy(gradient, gradient + dim, j.grad_.begin());
    return j;
  }

  int dim() const noexcept { return dim_; }
  double value() const noexcept { return value_; }
  double grad(int i) const noexcept { return grad_[i]; }
  double& grad(int i) noexcept { return grad_[i]; }
  double& value() noexcept { return value_; }

  Jet1 operator-() const {
    Jet1 r = *this;
    r.value_ = -r.value_;
    for (int i = 0; i < dim_; ++i) r.grad_[i] = -r.grad_[i];
    return r;
  }

  Jet1& operator+=(const Jet1& b) {
    detail::check_same_dim(dim_, b.dim_);
    value_ += b.value_;
    for (int i = 0; i < dim_; ++i) grad_[i] += b.grad_[i];
    return *this;
  }
  Jet1& operator-=(const Jet1& b) {
    detail::check_same_dim(dim_, b.dim_);
    value_ -= b.value_;
    for (int i = 0; i < dim_; ++i) grad_[i] -= b.grad_[i];
    return *this;
  }
  Jet1& operator*=(double s) {
    value_ *= s;
    for (int i = 0; i < dim_; ++i) grad_[i] *= s;
    return *this;
  }
  Jet1& operator+=(double s) {
    value_ += s;
    return *this;
  }

  friend Jet1 operator+(Jet1 a, const Jet1& b) { return a += b; }
  friend Jet1 operator-(Jet1 a, const Jet1& b) { return a -= b; }
  friend Jet1 operator*(Jet1 a, double s) { return a *= s; }
  friend Jet1 operator*(double s, Jet1 a) { return a *= s; }
  friend Jet1 operator+(Jet1 a, double s) { return a += s; }
  friend Jet1 operator+(double s, Jet1 a) { return a += s; }
  friend Jet1 operator-(Jet1 a, double s) { return a += -s; }
  friend Jet1 operator-(double s, const Jet1& a) { return (-a) + s; }

  friend Jet1 operator*(const Jet1& a, const Jet1& b) {
    detail::check_same_dim(a.dim_, b.dim_);
    Jet1 r = constant(a.value_ * b.value_, a.dim_);
    for (int i = 0; i < a.dim_; ++i) r.grad_[i] = a.grad_[i] * b.value_ + a.value_ * b.grad_[i];
    return r;
  }

  friend Jet1 operator/(const Jet1& a, const Jet1& b) {
    detail::check_same_dim(a.dim_, b.dim_);
    if (b.value_ == 0.0) throw DomainError("div", 0.0, " (division by zero)");
    const double q = a.value_ / b.value_;
    Jet1 r = constant(q, a.dim_);
    for (int i = 0; i < a.dim_; ++i) r.grad_[i] = (a.grad_[i] - q * b.grad_[i]) / b.value_;
    return r;
  }
  friend Jet1 operator/(const Jet1& a, double s) { return a * (1.0 / s); }

  /// Chain rule with precomputed univariate derivatives d = (f, f', ...).
  friend Jet1 compose(const Jet1& a, const std::array<double, 4>& d) {
    Jet1 r = constant(d[0], a.dim_);
    for (int i = 0; i < a.dim_; ++i) r.grad_[i] = d[1] * a.grad_[i];
    return r;
  }

 private:
  int dim_ = 1;
  double value_ = 0.0;
  std::array<double, kMaxDim> grad_{};
};

// ---------------------------------------------------------------------------
// Jet3: value and all partials through order three
// ---------------------------------------------------------------------------

class Jet3 {
 public:
  Jet3() = default;

  static Jet3 constant(double c, int dim) {
    detail::check_dim(dim);
    Jet3 j;
    j.dim_ = dim;
    j.value_ = c;
    return j;
  }

  /// The coordinate function x_index seeded at x0.
  static Jet3 variable(int index, double x0, int dim) {
    detail::check_dim(dim);
    if (index < 0 || index >= dim)
      throw Error(ErrorKind::dimension, "seed index " + std::to_string(index) + " out of range for dim " +
                                            std::to_string(dim));
    Jet3 j = constant(x0, dim);
    j.grad_[index] = 1.0;
    return j;
  }

  int dim() const noexcept { return dim_; }
  double value() const noexcept { return value_; }
  double grad(int i) const noexcept { return grad_[i]; }

  double hess(int i, int j) const noexcept {
    if (i > j) std::swap(i, j);
    return hess_[detail::hess_slot(i, j)];
  }

  double cube(int i, int j, int k) const noexcept {
    if (i > j) std::swap(i, j);
    if (j > k) std::swap(j, k);
    if (i > j) std::swap(i, j);
    return cube_[detail::cube_slot(i, j, k)];
  }

  /// First-order view: value with gradient.
  Jet1 to_jet1() const { return Jet1::from(value_, grad_.data(), dim_); }

  /// ∂_a of this function as a first-order jet (value ∂_a f, gradient ∂_b ∂_a f).
  Jet1 partial(int a) const {
    Jet1 r = Jet1::constant(grad_[a], dim_);
    for (int b = 0; b < dim_; ++b) r.grad(b) = hess(a, b);
    return r;
  }

  /// ∂_a ∂_b of this function as a first-order jet.
  Jet1 partial2(int a, int b) const {
    Jet1 r = Jet1::constant(hess(a, b), dim_);
    for (int c = 0; c < dim_; ++c) r.grad(c) = cube(a, b, c);
    return r;
  }

  Jet3 operator-() const {
    Jet3 r = *this;
    r.scale(-1.0);
    return r;
  }

  Jet3& operator+=(const Jet3& b) {
    detail::check_same_dim(dim_, b.dim_);
    value_ += b.value_;
    for (int i = 0; i < dim_; ++i) grad_[i] += b.grad_[i];
    for (int p = 0; p < detail::tri(dim_); ++p) hess_[p] += b.hess_[p];
    for (int q = 0; q < detail::tet(dim_); ++q) cube_[q] += b.cube_[q];
    return *this;
  }

  Jet3& operator-=(const Jet3& b) {
    detail::check_same_dim(dim_, b.dim_);
    value_ -= b.value_;
    for (int i = 0; i < dim_; ++i) grad_[i] -= b.grad_[i];
    for (int p = 0; p < detail::tri(dim_); ++p) hess_[p] -= b.hess_[p];
    for (int q = 0; q < detail::tet(dim_); ++q) cube_[q] -= b.cube_[q];
    return *this;
  }

  Jet3& operator*=(double s) {
    scale(s);
    return *this;
  }
  Jet3& operator+=(double s) {
    value_ += s;
    return *this;
  }

  friend Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
  friend Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
  friend Jet3 operator*(Jet3 a, double s) { return a *= s; }
  friend Jet3 operator*(double s, Jet3 a) { return a *= s; }
  friend Jet3 operator+(Jet3 a, double s) { return a += s; }
  friend Jet3 operator+(double s, Jet3 a) { return a += s; }
  friend Jet3 operator-(Jet3 a, double s) { return a += -s; }
  friend Jet3 operator-(double s, const Jet3& a) { return (-a) + s; }

  friend Jet3 operator*(const Jet3& a, const Jet3& b) {
    detail::check_same_dim(a.dim_, b.dim_);
    const int n = a.dim_;
    Jet3 r = constant(a.value_ * b.value_, n);
    for (int i = 0; i < n; ++i) r.grad_[i] = a.grad_[i] * b.value_ + a.value_ * b.grad_[i];
    for (int p = 0; p < detail::tri(n); ++p) {
      const auto [i, j] = detail::kHessTable[p];
      r.hess_[p] = a.hess_[p] * b.value_ + a.grad_[i] * b.grad_[j] + a.grad_[j] * b.grad_[i] +
                   a.value_ * b.hess_[p];
    }
    for (int q = 0; q < detail::tet(n); ++q) {
      const auto& e = detail::kCubeTable[q];
      r.cube_[q] = a.cube_[q] * b.value_ + a.value_ * b.cube_[q] +            //
                   a.hess_[e.ij] * b.grad_[e.k] + a.hess_[e.ik] * b.grad_[e.j] +  //
                   a.hess_[e.jk] * b.grad_[e.i] + a.grad_[e.i] * b.hess_[e.jk] +  //
                   a.grad_[e.j] * b.hess_[e.ik] + a.grad_[e.k] * b.hess_[e.ij];
    }
    return r;
  }

  // Quotient q = a / b from the Leibniz expansion of a = q·b, solved slot by slot.
  friend Jet3 operator/(const Jet3& a, const Jet3& b) {
    detail::check_same_dim(a.dim_, b.dim_);
    if (b.value_ == 0.0) throw DomainError("div", 0.0, " (division by zero)");
    const int n = a.dim_;
    const double bv = b.value_;
    Jet3 q = constant(a.value_ / bv, n);
    for (int i = 0; i < n; ++i) q.grad_[i] = (a.grad_[i] - q.value_ * b.grad_[i]) / bv;
    for (int p = 0; p < detail::tri(n); ++p) {
      const auto [i, j] = detail::kHessTable[p];
      q.hess_[p] =
          (a.hess_[p] - q.grad_[i] * b.grad_[j] - q.grad_[j] * b.grad_[i] - q.value_ * b.hess_[p]) / bv;
    }
    for (int s = 0; s < detail::tet(n); ++s) {
      const auto& e = detail::kCubeTable[s];
      const double mixed = q.hess_[e.ij] * b.grad_[e.k] + q.hess_[e.ik] * b.grad_[e.j] +
                           q.hess_[e.jk] * b.grad_[e.i] + q.grad_[e.i] * b.hess_[e.jk] +
                           q.grad_[e.j] * b.hess_[e.ik] + q.grad_[e.k] * b.hess_[e.ij];
      q.cube_[s] = (a.cube_[s] - mixed - q.value_ * b.cube_[s]) / bv;
    }
    return q;
  }
  friend Jet3 operator/(const Jet3& a, double s) { return a * (1.0 / s); }

  /// Faà di Bruno truncated at order three, d = (f, f', f'', f''') at a.value().
  friend Jet3 compose(const Jet3& a, const std::array<double, 4>& d) {
    const int n = a.dim_;
    Jet3 r = constant(d[0], n);
    for (int i = 0; i < n; ++i) r.grad_[i] = d[1] * a.grad_[i];
    for (int p = 0; p < detail::tri(n); ++p) {
      const auto [i, j] = detail::kHessTable[p];
      r.hess_[p] = d[1] * a.hess_[p] + d[2] * a.grad_[i] * a.grad_[j];
    }
    for (int q = 0; q < detail::tet(n); ++q) {
      const auto& e = detail::kCubeTable[q];
      r.cube_[q] = d[1] * a.cube_[q] +
                   d[2] * (a.hess_[e.ij] * a.grad_[e.k] + a.hess_[e.ik] * a.grad_[e.j] +
                           a.hess_[e.jk] * a.grad_[e.i]) +
                   d[3] * a.grad_[e.i] * a.grad_[e.j] * a.grad_[e.k];
    }
    return r;
  }

 private:
  void scale(double s) {
    value_ *= s;
    for (int i = 0; i < dim_; ++i) grad_[i] *= s;
    for (int p = 0; p < detail::tri(dim_); ++p) hess_[p] *= s;
    for (int q = 0; q < detail::tet(dim_); ++q) cube_[q] *= s;
  }

  int dim_ = 1;
  double value_ = 0.0;
  std::array<double, kMaxDim> grad_{};
  std::array<double, detail::tri(kMaxDim)> hess_{};
  std::array<double, detail::tet(kMaxDim)> cube_{};
};

// ---------------------------------------------------------------------------
// Scalar-generic helpers shared by double, Jet1 and Jet3
// ---------------------------------------------------------------------------

inline double compose(double, const std::array<double, 4>& d) { return d[0]; }

inline double value_of(double x) noexcept { return x; }
inline double value_of(const Jet1& x) noexcept { return x.value(); }
inline double value_of(const Jet3& x) noexcept { return x.value(); }

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static double constant(double c, int) { return c; }
  static double variable(int, double x0, int) { return x0; }
};

template <>
struct ScalarTraits<Jet1> {
  static Jet1 constant(double c, int dim) { return Jet1::constant(c, dim); }
  static Jet1 variable(int i, double x0, int dim) { return Jet1::variable(i, x0, dim); }
};

template <>
struct ScalarTraits<Jet3> {
  static Jet3 constant(double c, int dim) { return Jet3::constant(c, dim); }
  static Jet3 variable(int i, double x0, int dim) { return Jet3::variable(i, x0, dim); }
};

inline int dim_of(double) noexcept { return 1; }
inline int dim_of(const Jet1& x) noexcept { return x.dim(); }
inline int dim_of(const Jet3& x) noexcept { return x.dim(); }

/// Apply an elementary function via its univariate Taylor coefficients.
template <class S>
S elementary(Elementary fn, const S& a, double exponent = 0.0) {
  return compose(a, taylor_coefficients(fn, value_of(a), exponent));
}

inline double divide(double a, double b) {
  if (b == 0.0) throw DomainError("div", 0.0, " (division by zero)");
  return a / b;
}
inline Jet1 divide(const Jet1& a, const Jet1& b) { return a / b; }
inline Jet3 divide(const Jet3& a, const Jet3& b) { return a / b; }

/// a^n for integer n by binary exponentiation (exact Leibniz products).
template <class S>
S integer_power(const S& a, long long n) {
  if (n == 0) return ScalarTraits<S>::constant(1.0, dim_of(a));
  const bool negative = n < 0;
  unsigned long long m = negative ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
  S base = a;
  S result = ScalarTraits<S>::constant(1.0, dim_of(a));
  bool first = true;
  while (m > 0) {
    if (m & 1ULL) {
      result = first ? base : result * base;
      first = false;
    }
    m >>= 1ULL;
    if (m > 0) base = base * base;
  }
  if (negative) return divide(ScalarTraits<S>::constant(1.0, dim_of(a)), result);
  return result;
}

enum class BinaryOp { add, sub, mul, div };

/// Arithmetic combination with dimension and zero-divisor checks.
template <class S>
S combine(BinaryOp op, const S& a, const S& b) {
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div: return divide(a, b);
  }
  return a;
}

}  // namespace rwcert
