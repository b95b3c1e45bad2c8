#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/criteria.hpp"

using namespace rwcert;

namespace {

Jet3 x_at(double x0) { return Jet3::variable(0, x0, 1); }

}  // namespace

TEST(Jet3, SeedVariable) {
  const Jet3 a = Jet3::variable(0, 2.0, 4);
  EXPECT_EQ(a.value(), 2.0);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(a.grad(i), i == 0 ? 1.0 : 0.0);
    for (int j = 0; j < 4; ++j) {
      EXPECT_EQ(a.hess(i, j), 0.0);
      for (int k = 0; k < 4; ++k) EXPECT_EQ(a.cube(i, j, k), 0.0);
    }
  }
  const Jet3 b = Jet3::variable(3, -1.5, 4);
  EXPECT_EQ(b.value(), -1.5);
  EXPECT_EQ(b.grad(3), 1.0);
  EXPECT_EQ(b.grad(0), 0.0);
}

TEST(Jet3, SeedOutOfRangeThrows) {
  try {
    (void)Jet3::variable(5, 0.0, 4);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension);
  }
  EXPECT_THROW((void)Jet3::variable(0, 0.0, 9), Error);
}

TEST(Jet3, SquareOfVariable) {
  const Jet3 x = x_at(2.0);
  const Jet3 y = x * x;
  EXPECT_EQ(y.value(), 4.0);
  EXPECT_EQ(y.grad(0), 4.0);
  EXPECT_EQ(y.hess(0, 0), 2.0);
  EXPECT_EQ(y.cube(0, 0, 0), 0.0);
}

TEST(Jet3, Reciprocal) {
  const Jet3 q = Jet3::constant(1.0, 1) / x_at(2.0);
  EXPECT_DOUBLE_EQ(q.value(), 0.5);
  EXPECT_DOUBLE_EQ(q.grad(0), -0.25);
  EXPECT_DOUBLE_EQ(q.hess(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(q.cube(0, 0, 0), -0.375);
}

TEST(Jet3, MismatchedDimensionsThrow) {
  const Jet3 a = Jet3::variable(0, 1.0, 2), b = Jet3::variable(0, 1.0, 3);
  EXPECT_THROW((void)(a + b), Error);
  EXPECT_THROW((void)(a * b), Error);
}

TEST(Jet3, DivisionByZeroValue) {
  const Jet3 zero = Jet3::constant(0.0, 2);
  try {
    (void)(Jet3::variable(0, 1.0, 2) / zero);
    FAIL() << "expected a domain error";
  } catch (const DomainError& e) {
    EXPECT_EQ(e.fn(), "div");
  }
}

TEST(Jet3, SinAtZero) {
  const Jet3 s = elementary(Elementary::sin, x_at(0.0));
  EXPECT_EQ(s.value(), 0.0);
  EXPECT_EQ(s.grad(0), 1.0);
  EXPECT_EQ(s.hess(0, 0), 0.0);
  EXPECT_EQ(s.cube(0, 0, 0), -1.0);
}

TEST(Jet3, LnOfNegativeIsDomainError) {
  try {
    (void)elementary(Elementary::ln, x_at(-1.0));
    FAIL() << "expected a domain error";
  } catch (const DomainError& e) {
    EXPECT_EQ(e.fn(), "ln");
    EXPECT_EQ(e.value(), -1.0);
  }
  EXPECT_THROW((void)elementary(Elementary::sqrt, x_at(0.0)), DomainError);
  EXPECT_THROW((void)elementary(Elementary::pow_const, x_at(-2.0), 0.5), DomainError);
}

TEST(Jet3, ExpOfSquareMatchesFiniteDifferences) {
  const Jet3 x = x_at(1.0);
  const Jet3 y = elementary(Elementary::exp, x * x);
  const oracle::Scalar f = [](const std::vector<double>& q) { return std::exp(q[0] * q[0]); };
  const std::vector<double> p = {1.0};
  // plain central differences at step 1e-4 for orders one and two
  EXPECT_LT(oracle::rel_err(y.grad(0), oracle::central(f, p, {0}, 1e-4)), 1e-5);
  EXPECT_LT(oracle::rel_err(y.hess(0, 0), oracle::central(f, p, {0, 0}, 1e-4)), 1e-5);
  // third order needs a wider step against roundoff
  EXPECT_LT(oracle::rel_err(y.cube(0, 0, 0), oracle::richardson2(f, p, {0, 0, 0}, 0.03)), 1e-5);
  // closed forms: (2x, 4x²+2, 8x³+12x)·e^{x²}
  EXPECT_NEAR(y.grad(0), 2.0 * M_E, 1e-12);
  EXPECT_NEAR(y.hess(0, 0), 6.0 * M_E, 1e-12);
  EXPECT_NEAR(y.cube(0, 0, 0), 20.0 * M_E, 1e-12);
}

TEST(Jet3, SlotsAreSymmetric) {
  const Jet3 x = Jet3::variable(0, 0.7, 3), y = Jet3::variable(1, 1.3, 3), z = Jet3::variable(2, -0.4, 3);
  const Jet3 f = elementary(Elementary::sin, x * y) * elementary(Elementary::exp, z) / (x + y * y);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      EXPECT_EQ(f.hess(i, j), f.hess(j, i));
      for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(f.cube(i, j, k), f.cube(k, i, j));
        EXPECT_EQ(f.cube(i, j, k), f.cube(j, k, i));
        EXPECT_EQ(f.cube(i, j, k), f.cube(j, i, k));
        EXPECT_TRUE(std::isfinite(f.cube(i, j, k)));
      }
    }
}

TEST(Jet3, AlgebraicLaws) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Jet3 x = Jet3::variable(0, u(rng), 2), y = Jet3::variable(1, u(rng), 2);
    const Jet3 a = elementary(Elementary::sin, x) + y, b = x * y - 1.0, c = elementary(Elementary::cosh, y);
    EXPECT_EQ((a * b).value(), (b * a).value());
    EXPECT_NEAR(((a * b) * c).value(), (a * (b * c)).value(), 1e-15 * (1.0 + std::abs((a * b * c).value())));
    const Jet3 s1 = a + b, s2 = b + a;
    EXPECT_EQ(s1.value(), s2.value());
    for (int i = 0; i < 2; ++i) {
      EXPECT_EQ(s1.grad(i), a.grad(i) + b.grad(i));
      for (int j = 0; j < 2; ++j) {
        EXPECT_EQ(s1.hess(i, j), a.hess(i, j) + b.hess(i, j));
        for (int k = 0; k < 2; ++k) EXPECT_EQ(s1.cube(i, j, k), a.cube(i, j, k) + b.cube(i, j, k));
      }
    }
  }
}

TEST(Jet3, IntegerPowerIsExact) {
  const Jet3 x = x_at(3.0);
  const Jet3 p = integer_power(x, 4);
  EXPECT_EQ(p.value(), 81.0);
  EXPECT_EQ(p.grad(0), 108.0);
  EXPECT_EQ(p.hess(0, 0), 108.0);
  EXPECT_EQ(p.cube(0, 0, 0), 72.0);
  const Jet3 inv = integer_power(x, -1);
  EXPECT_DOUBLE_EQ(inv.grad(0), -1.0 / 9.0);
}

TEST(Jet3, TaylorCoefficientsOfEveryElementary) {
  const double x = 0.6;
  const oracle::Scalar fns[] = {
      [](const std::vector<double>& q) { return std::sin(q[0]); },
      [](const std::vector<double>& q) { return std::cos(q[0]); },
      [](const std::vector<double>& q) { return std::tan(q[0]); },
      [](const std::vector<double>& q) { return std::sinh(q[0]); },
      [](const std::vector<double>& q) { return std::cosh(q[0]); },
      [](const std::vector<double>& q) { return std::tanh(q[0]); },
      [](const std::vector<double>& q) { return std::exp(q[0]); },
      [](const std::vector<double>& q) { return std::log(q[0]); },
      [](const std::vector<double>& q) { return std::sqrt(q[0]); },
      [](const std::vector<double>& q) { return std::pow(q[0], 2.5); },
  };
  const Elementary kinds[] = {Elementary::sin,  Elementary::cos, Elementary::tan, Elementary::sinh,
                              Elementary::cosh, Elementary::tanh, Elementary::exp, Elementary::ln,
                              Elementary::sqrt, Elementary::pow_const};
  for (int k = 0; k < 10; ++k) {
    const Jet3 j = elementary(kinds[k], x_at(x), 2.5);
    const std::vector<double> p = {x};
    EXPECT_NEAR(j.value(), fns[k](p), 1e-15) << to_string(kinds[k]);
    EXPECT_LT(oracle::rel_err(j.grad(0), *oracle::converged_derivative(fns[k], p, {0})), 1e-9) << to_string(kinds[k]);
    EXPECT_LT(oracle::rel_err(j.hess(0, 0), *oracle::converged_derivative(fns[k], p, {0, 0})), 1e-8)
        << to_string(kinds[k]);
    EXPECT_LT(oracle::rel_err(j.cube(0, 0, 0), *oracle::converged_derivative(fns[k], p, {0, 0, 0}, 1e-6)), 1e-6)
        << to_string(kinds[k]);
  }
}

TEST(Jet3, RandomExpressionsMatchFiniteDifferences) {
  const criteria::JetSweep s = criteria::jet_sweep(200, 11);
  EXPECT_EQ(s.accepted, 200);
  EXPECT_LT(s.worst, 1e-5) << s.worst_expr;
}

TEST(Jet1, ConsistentWithJet3) {
  const Jet3 x = Jet3::variable(0, 0.8, 2), y = Jet3::variable(1, 1.7, 2);
  const Jet3 f3 = elementary(Elementary::ln, x * y + 1.0) / elementary(Elementary::cosh, x - y);
  const Jet1 a = Jet1::variable(0, 0.8, 2), b = Jet1::variable(1, 1.7, 2);
  const Jet1 f1 = elementary(Elementary::ln, a * b + 1.0) / elementary(Elementary::cosh, a - b);
  EXPECT_DOUBLE_EQ(f1.value(), f3.value());
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(f1.grad(i), f3.grad(i), 1e-15);
  const Jet1 dx = f3.partial(0);
  EXPECT_DOUBLE_EQ(dx.value(), f3.grad(0));
  EXPECT_DOUBLE_EQ(dx.grad(1), f3.hess(0, 1));
}
