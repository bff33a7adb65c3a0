#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "frg/fixedpoint.hpp"
#include "test_support.hpp"

namespace frg {
namespace {

using frg::testing::trace_of;

Word W(const std::string& s) { return Alphabet::standard(2).parse(s); }

ActionSeries action(std::size_t letters, std::vector<Operator> ops) {
  ActionSeries a;
  a.alphabet = Alphabet::standard(letters);
  for (std::size_t c = 0; c < letters; ++c) a.kinetic.push_back({static_cast<Letter>(c), make_rational(1, 2), 0});
  a.operators = std::move(ops);
  return a;
}

BetaSystem large_n(const ActionSeries& act, unsigned k_max, std::size_t degree_max) {
  BetaSystem bs = extract_beta(rhs_wetterich(act, {k_max, k_max, degree_max}).terms, act);
  ScalingSolution s = solve_scaling(bs);
  EXPECT_TRUE(s.feasible);
  return large_n_limit(bs, s);
}

Operator quartic(const std::string& name, const std::string& w, Rational sym) {
  return {Symbol::bare(name), sym, trace_of({W(w)})};
}

BetaSystem quartic_system() { return large_n(action(1, {quartic("g", "AAAA", make_rational(1, 4))}), 2, 4); }

TEST(NumericSystemTest, LayoutAndDeterminism) {
  NumericSystem sys = NumericSystem::from(quartic_system());
  ASSERT_EQ(sys.dim(), 2u);
  EXPECT_EQ(sys.n_couplings(), 1u);
  EXPECT_EQ(sys.labels(), (std::vector<std::string>{"g~", "eta_A"}));
  Eigen::VectorXd x(2);
  x << 0.3, -0.2;
  EXPECT_EQ(sys.residual(x), sys.residual(x));
  EXPECT_THROW(NumericSystem::from(BetaSystem{}), std::invalid_argument);
}

TEST(NumericSystemTest, JacobianMatchesFiniteDifferences) {
  NumericSystem sys = NumericSystem::from(quartic_system());
  Eigen::VectorXd x(2);
  x << -0.4, 0.7;
  const Eigen::MatrixXd j = sys.jacobian(x);
  const double h = 1e-6;
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    const Eigen::VectorXd fd = (sys.residual(xp) - sys.residual(xm)) / (2 * h);
    for (int r = 0; r < 2; ++r) EXPECT_NEAR(j(r, c), fd[r], 1e-7);
  }
}

TEST(NewtonTest, GaussianAlwaysFound) {
  NumericSystem sys = NumericSystem::from(quartic_system());
  auto res = newton_multistart(sys, {.starts = 8});
  bool gaussian = false;
  for (const auto& r : res.roots)
    if (r.values.lpNorm<Eigen::Infinity>() < 1e-12) {
      gaussian = true;
      // Linearization at zero: beta = kappa g with kappa = 1, eta = O(g).
      ASSERT_EQ(r.stability.eigenvalues.size(), 1u);
      EXPECT_NEAR(r.stability.eigenvalues[0].real(), -1.0, 1e-12);
    }
  EXPECT_TRUE(gaussian);
}

// Oracle: eta solved by hand from eta = 2 g pi (1/4 - eta/24), then a dense
// scan of beta(g, eta(g)) for sign changes.
TEST(NewtonTest, QuarticMatchesGridScan) {
  const BetaSystem bs = quartic_system();
  NumericSystem sys = NumericSystem::from(bs);
  auto res = newton_multistart(sys, {.starts = 64, .seed = 7});
  const double pi = std::numbers::pi;
  auto eta_of = [&](double g) { return (pi * g / 2) / (1 + pi * g / 12); };
  auto beta_of = [&](double g) {
    const double e = eta_of(g);
    return (1 + 2 * e) * g + 4 * g * g * pi * (1.0 / 6 - e / 48);
  };
  const int cells = 4000;
  int sign_changes = 0;
  for (int i = 0; i < cells; ++i) {
    const double a = -1 + 2.0 * i / cells, b = -1 + 2.0 * (i + 1) / cells;
    if (beta_of(a) != 0 && beta_of(a) * beta_of(b) >= 0) continue;
    ++sign_changes;
    bool found = false;
    for (const auto& r : res.roots)
      if (r.values[0] >= a - 1e-9 && r.values[0] <= b + 1e-9) found = true;
    EXPECT_TRUE(found) << "cell [" << a << ", " << b << "]";
  }
  EXPECT_EQ(sign_changes, 2);

  std::size_t nontrivial = 0;
  for (const auto& r : res.roots) {
    if (std::abs(r.values[0]) < 1e-9) continue;
    if (r.values[0] < -1 || r.values[0] > 1) continue;
    ++nontrivial;
    EXPECT_EQ(r.positive_eigenvalues(), 1u);
    EXPECT_NEAR(r.values[1], eta_of(r.values[0]), 1e-10);
  }
  EXPECT_EQ(nontrivial, 1u);
}

TEST(NewtonTest, RootsSatisfyIndependentResidual) {
  const BetaSystem bs = quartic_system();
  NumericSystem sys = NumericSystem::from(bs);
  auto res = newton_multistart(sys, {.starts = 32, .seed = 3});
  ASSERT_FALSE(res.roots.empty());
  for (const auto& r : res.roots) {
    auto value = [&](const Symbol& s) {
      if (s.kind == SymbolKind::Pi) return std::numbers::pi;
      return s.kind == SymbolKind::Eta ? r.values[1] : r.values[0];
    };
    EXPECT_LT(std::abs(bs.beta[0].rhs.evaluate(value)), 1e-12);
    EXPECT_LT(std::abs(r.values[1] - bs.eta[0].rhs.evaluate(value)), 1e-12);
    EXPECT_LT(r.residual_norm, 1e-12);
  }
  for (std::size_t i = 0; i < res.roots.size(); ++i)
    for (std::size_t j = i + 1; j < res.roots.size(); ++j)
      EXPECT_GT((res.roots[i].values - res.roots[j].values).norm(), 1e-8);
}

TEST(NewtonTest, NoRootGivesDiagnostics) {
  BetaSystem bs;
  bs.large_n = true;
  bs.alphabet = Alphabet::standard(1);
  const Symbol g = Symbol::running("g");
  bs.beta = {{g, ScalarPoly(g).pow(2) + ScalarPoly(Rational(1))}};
  NumericSystem sys = NumericSystem::from(bs);
  auto res = newton_multistart(sys, {.starts = 10});
  EXPECT_TRUE(res.roots.empty());
  EXPECT_FALSE(res.diagnostics.empty());
  EXPECT_THROW(newton_multistart(sys, {.tol = 0}), std::invalid_argument);
}

std::vector<std::vector<double>> spectra(const MultistartResult& res) {
  std::vector<std::vector<double>> out;
  for (const auto& r : res.roots) {
    std::vector<double> s;
    for (const auto& z : r.stability.eigenvalues) {
      s.push_back(std::round(z.real() * 1e6) / 1e6);
      s.push_back(std::round(std::abs(z.imag()) * 1e6) / 1e6);
    }
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(StabilityTest, InvariantUnderRelabeling) {
  auto ops = [](const char* a4, const char* b4) {
    return std::vector<Operator>{quartic("gA", a4, make_rational(1, 4)), quartic("gB", b4, make_rational(1, 4)),
                                 quartic("gX", "ABAB", make_rational(1, 2))};
  };
  const auto first = large_n(action(2, ops("AAAA", "BBBB")), 2, 4);
  auto swapped_ops = ops("BBBB", "AAAA");
  std::reverse(swapped_ops.begin(), swapped_ops.end());
  const auto second = large_n(action(2, swapped_ops), 2, 4);
  NewtonOptions opt{.starts = 48, .seed = 11};
  const auto r1 = newton_multistart(NumericSystem::from(first), opt);
  const auto r2 = newton_multistart(NumericSystem::from(second), opt);
  ASSERT_GT(r1.roots.size(), 1u);
  // Both runs may miss different roots; compare the roots they share.
  const auto s1 = spectra(r1), s2 = spectra(r2);
  std::size_t shared = 0;
  for (const auto& s : s1)
    if (std::find(s2.begin(), s2.end(), s) != s2.end()) ++shared;
  EXPECT_GE(shared, 2u);
  // Each root of one system maps to a root of the other with the same spectrum.
  NumericSystem sys2 = NumericSystem::from(second);
  for (const auto& r : r1.roots) {
    Eigen::VectorXd y(5);
    y << r.values[2], r.values[1], r.values[0], r.values[4], r.values[3];
    ASSERT_LT(sys2.residual(y).lpNorm<Eigen::Infinity>(), 1e-10);
    const auto st = stability(sys2, y);
    ASSERT_EQ(st.eigenvalues.size(), r.stability.eigenvalues.size());
    for (std::size_t i = 0; i < st.eigenvalues.size(); ++i)
      EXPECT_NEAR(std::abs(st.eigenvalues[i] - r.stability.eigenvalues[i]), 0, 1e-8);
  }
}

}  // namespace
}  // namespace frg
