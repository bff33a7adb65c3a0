#include <gtest/gtest.h>

#include <random>

#include "frg/scalar_poly.hpp"

namespace frg {
namespace {

const Symbol g = Symbol::bare("g");
const Symbol h = Symbol::bare("h");
const Symbol z = Symbol::z("A");

TEST(ScalarPolyTest, ArithmeticCancels) {
  ScalarPoly p = ScalarPoly(g) * make_rational(1, 2) + ScalarPoly(h, 2);
  ScalarPoly q = p - p;
  EXPECT_TRUE(q.is_zero());
  EXPECT_EQ(to_string(p), "1/2*g + h^2");
}

TEST(ScalarPolyTest, LaurentExponents) {
  ScalarPoly p = ScalarPoly(z, -1) * ScalarPoly(z, 1);
  EXPECT_EQ(p, ScalarPoly(1));
  EXPECT_EQ(to_string(ScalarPoly(z, -2)), "Z_A^-2");
}

TEST(ScalarPolyTest, SubstituteMonomialWithNegativePower) {
  ScalarPoly p = ScalarPoly(g) * ScalarPoly(z, -1);
  ScalarPoly r = p.substitute(z, ScalarPoly(Symbol::n(), 2) * make_rational(3));
  EXPECT_EQ(r, ScalarPoly(g) * ScalarPoly(Symbol::n(), -2) * make_rational(1, 3));
  EXPECT_THROW(p.substitute(z, ScalarPoly(g) + ScalarPoly(h)), std::invalid_argument);
}

TEST(ScalarPolyTest, DerivativeAndDegree) {
  ScalarPoly p = ScalarPoly(g, 3) * make_rational(2) + ScalarPoly(g) * ScalarPoly(h);
  EXPECT_EQ(p.derivative(g), ScalarPoly(g, 2) * make_rational(6) + ScalarPoly(h));
  EXPECT_EQ(p.coupling_degree(), 3);
}

TEST(ScalarPolyTest, EvaluationMatchesExpansion) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  ScalarPoly a = ScalarPoly(g) + make_rational(1, 3);
  ScalarPoly b = ScalarPoly(h, 2) - ScalarPoly(g);
  for (int i = 0; i < 50; ++i) {
    double gv = u(rng), hv = u(rng);
    auto val = [&](const Symbol& s) { return s == g ? gv : hv; };
    EXPECT_NEAR((a * b).evaluate(val), a.evaluate(val) * b.evaluate(val), 1e-12);
  }
}

}  // namespace
}  // namespace frg
