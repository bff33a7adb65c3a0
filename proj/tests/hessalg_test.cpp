#include <gtest/gtest.h>

#include <random>

#include "frg/hessalg.hpp"
#include "test_support.hpp"

namespace frg {
namespace {

using testing::trace_of;

const Alphabet kAbc = Alphabet::standard(26);
Word W(const std::string& s) { return kAbc.parse(s); }
const Word kOne{};

TEST(StarTest, ProductRules) {
  EXPECT_EQ(star(AElem::tensor(W("A"), W("B")), AElem::tensor(W("C"), W("D"))), AElem::tensor(W("CA"), W("BD")));
  EXPECT_EQ(star(AElem::box(kOne, kOne), AElem::box(kOne, kOne)), AElem::box(kOne, kOne, 1, TraceMonomial::n_to(1)));
  EXPECT_EQ(star(AElem::box(W("A"), W("B")), AElem::tensor(W("C"), W("D"))), AElem::box(W("A"), W("CBD")));
  EXPECT_EQ(star(AElem::tensor(W("A"), W("B")), AElem::box(W("C"), W("D"))), AElem::box(W("BCA"), W("D")));
  EXPECT_EQ(star(AElem::box(W("A"), W("B")), AElem::box(W("C"), W("D"))),
            AElem::box(W("A"), W("D"), 1, trace_of({W("BC")})));
}

TEST(StarTest, UnitAndNonUnit) {
  std::mt19937_64 rng(1);
  const AElem one = AElem::unit();
  const AElem box_one = AElem::box(kOne, kOne);
  for (int i = 0; i < 20; ++i) {
    AElem x = testing::random_aelem(rng, 3, 3);
    EXPECT_EQ(star(one, x), x);
    EXPECT_EQ(star(x, one), x);
  }
  AElem t = AElem::tensor(W("A"), W("B"));
  EXPECT_NE(star(box_one, t), t);
}

TEST(StarTest, Associativity) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 300; ++i) {
    AElem x = testing::random_aelem(rng, 3, 3);
    AElem y = testing::random_aelem(rng, 3, 3);
    AElem z = testing::random_aelem(rng, 3, 3);
    EXPECT_EQ(star(star(x, y), z), star(x, star(y, z)));
  }
}

TEST(StarTest, TildeIsAntiInvolution) {
  std::mt19937_64 rng(3);
  EXPECT_EQ(tilde(AElem::tensor(W("P"), W("Q"))), AElem::tensor(W("Q"), W("P")));
  EXPECT_EQ(tilde(AElem::box(kOne, kOne)), AElem::box(kOne, kOne));
  for (int i = 0; i < 200; ++i) {
    AElem x = testing::random_aelem(rng, 3, 3);
    AElem y = testing::random_aelem(rng, 3, 3);
    EXPECT_EQ(tilde(tilde(x)), x);
    EXPECT_EQ(tilde(star(x, y)), star(tilde(y), tilde(x)));
  }
}

TEST(TraceTest, Units) {
  InvariantSum n2;
  n2.add(TraceMonomial::n_to(2), 1);
  EXPECT_EQ(tr_A(AElem::unit()), n2);
  InvariantSum n1;
  n1.add(TraceMonomial::n_to(1), 1);
  EXPECT_EQ(tr_A(AElem::box(kOne, kOne)), n1);
}

TEST(TraceTest, FourIdentities) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    Word u = testing::random_word(rng, 3, 3), w = testing::random_word(rng, 3, 3);
    Word p = testing::random_word(rng, 3, 3), q = testing::random_word(rng, 3, 3);
    auto single = [](const TraceMonomial& t) {
      InvariantSum s;
      s.add(t, 1);
      return s;
    };
    // (U (x) W)(T [x] V) traces to Tr(WTUV).
    EXPECT_EQ(tr_A(star(AElem::tensor(u, w), AElem::box(q, p))), single(tm_from_trace(w + q + u + p)));
    EXPECT_EQ(tr_A(star(AElem::box(u, w), AElem::tensor(p, q))), single(tm_from_trace(q + u + p + w)));
    EXPECT_EQ(tr_A(star(AElem::tensor(u, w), AElem::tensor(p, q))),
              single(tm_from_trace(p + u) * tm_from_trace(w + q)));
    EXPECT_EQ(tr_A(star(AElem::box(u, w), AElem::box(p, q))), single(tm_from_trace(w + p) * tm_from_trace(u + q)));
  }
}

TEST(HessTest, KineticIsUnit) {
  HessMatrix h = hess_single_trace(W("AA"), 1);
  EXPECT_EQ(h(0, 0), AElem::tensor(kOne, kOne, 2));
  Operator kin{Symbol::bare("z"), make_rational(1, 2), trace_of({W("AA")})};
  EXPECT_EQ(hess_operator(kin, 1)(0, 0), AElem::unit().scaled(ScalarPoly(Symbol::bare("z"))));
}

TEST(HessTest, CutsOfLongWord) {
  HessMatrix h = hess_single_trace(W("ABAABABB"), 2);
  const AElem& ba = h(1, 0);
  int left_empty = 0, right_empty = 0;
  for (const auto& t : ba.terms()) {
    left_empty += t.left.empty();
    right_empty += t.right.empty();
  }
  EXPECT_EQ(left_empty, 3);
  EXPECT_EQ(right_empty, 3);
  EXPECT_EQ(ba.data().count({TensorKind::Tensor, W("BAA"), W("ABB"), {}}), 1u);
}

TEST(HessTest, CaseOneEntry) {
  // X_a W X_b U with a = A, b = B, W = CD, U = EC.
  HessMatrix h = hess_single_trace(W("ACDBEC"), 5);
  EXPECT_EQ(h(0, 1), AElem::tensor(W("EC"), W("CD")));
}

TEST(HessTest, DoubleTraces) {
  Operator sq{Symbol::bare("g"), make_rational(1, 2), trace_of({W("C"), W("C")})};
  HessMatrix h = hess_operator(sq, 3);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      if (a == 2 && b == 2)
        EXPECT_EQ(h(a, b), AElem::box(kOne, kOne, ScalarPoly(Symbol::bare("g"))));
      else
        EXPECT_TRUE(h(a, b).is_zero());
    }

  // Tr(U X_a) Tr(X_b W) with U = C, W = D.
  HessMatrix d = hess_double_trace(W("CA"), W("BD"), 4);
  EXPECT_EQ(d(0, 1), AElem::box(W("C"), W("D")));

  // Tr(P X_c) Tr(Q X_c) with P = A, Q = B.
  HessMatrix e = hess_double_trace(W("AC"), W("BC"), 3);
  AElem cc = e(2, 2);
  EXPECT_EQ(cc.data().at({TensorKind::Box, W("A"), W("B"), {}}), ScalarPoly(1));
  EXPECT_EQ(cc.data().at({TensorKind::Box, W("B"), W("A"), {}}), ScalarPoly(1));
}

TEST(HessTest, TripleLinearTraces) {
  Symbol g = Symbol::bare("g");
  HessMatrix h = hess_operator({g, 1, trace_of({W("A"), W("B"), W("C")})}, 3);
  EXPECT_EQ(h(0, 1), AElem::box(kOne, kOne, ScalarPoly(g), trace_of({W("C")})));
  EXPECT_TRUE(h(0, 0).is_zero());
}

TEST(HessTest, WorkedThreeMatrixExample) {
  Symbol g1 = Symbol::bare("g1"), g2 = Symbol::bare("g2");
  Operator o1{g1, make_rational(1, 8), trace_of({W("AA"), W("AA")})};
  Operator o2{g2, 1, trace_of({W("ABC")})};
  HessMatrix h1 = hess_operator(o1, 3);
  AElem expected1 = AElem::tensor(kOne, kOne, ScalarPoly(g1) * make_rational(1, 2), trace_of({W("AA")})) +
                    AElem::box(W("A"), W("A"), ScalarPoly(g1));
  EXPECT_EQ(h1(0, 0), expected1);

  HessMatrix h2 = hess_operator(o2, 3);
  const ScalarPoly c2(g2);
  EXPECT_EQ(h2(0, 1), AElem::tensor(W("C"), kOne, c2));
  EXPECT_EQ(h2(1, 0), AElem::tensor(kOne, W("C"), c2));
  EXPECT_EQ(h2(1, 2), AElem::tensor(W("A"), kOne, c2));
  EXPECT_EQ(h2(2, 1), AElem::tensor(kOne, W("A"), c2));
  // Fixed by the cyclic symmetry A -> B -> C of Tr(ABC).
  EXPECT_EQ(h2(2, 0), AElem::tensor(W("B"), kOne, c2));
  EXPECT_EQ(h2(0, 2), AElem::tensor(kOne, W("B"), c2));
  for (std::size_t a = 0; a < 3; ++a) EXPECT_TRUE(h2(a, a).is_zero());

  HessMatrix sq = power(h2, 2);
  EXPECT_EQ(sq(0, 0), AElem::tensor(W("C"), W("C"), c2 * c2) + AElem::tensor(W("B"), W("B"), c2 * c2));

  InvariantSum got = supertrace(star_matrix(h1, sq));
  InvariantSum expected;
  ScalarPoly c = ScalarPoly(g1) * c2 * c2;
  expected.add(trace_of({W("AA"), W("C"), W("C")}), c * make_rational(1, 2));
  expected.add(trace_of({W("AA"), W("B"), W("B")}), c * make_rational(1, 2));
  expected.add(trace_of({W("ACAC")}), c);
  expected.add(trace_of({W("ABAB")}), c);
  EXPECT_EQ(got, expected);
}

TEST(HessTest, MatrixIdentities) {
  HessMatrix h = hess_operator({Symbol::bare("g"), 1, trace_of({W("ABAB")})}, 2);
  EXPECT_EQ(power(h, 1), h);
  EXPECT_EQ(power(HessMatrix::identity(3), 4), HessMatrix::identity(3));
  InvariantSum id;
  id.add(TraceMonomial::n_to(2), 3);
  EXPECT_EQ(supertrace(HessMatrix::identity(3)), id);
  HessMatrix boxes(3);
  for (std::size_t a = 0; a < 3; ++a) boxes(a, a) = AElem::box(kOne, kOne);
  InvariantSum nb;
  nb.add(TraceMonomial::n_to(1), 3);
  EXPECT_EQ(supertrace(boxes), nb);
}

TEST(HessTest, HessianIsTildeSymmetric) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    std::vector<Word> traces;
    const int t = 1 + i % 3;
    for (int r = 0; r < t; ++r) traces.push_back(testing::random_word(rng, 3, 4, 1));
    HessMatrix h = hess_trace_product(traces, 3);
    EXPECT_EQ(tilde_matrix(h), h);
  }
}

TEST(HessTest, DegreeTruncationIsExact) {
  HessMatrix h = hess_operator({Symbol::bare("g"), make_rational(1, 4), trace_of({W("AAAA")})}, 1);
  HessMatrix full = power(h, 3);
  HessMatrix cut = power(h, 3, Truncation{4});
  for (const auto& [k, c] : full(0, 0).data()) {
    if (k.degree() <= 4) {
      EXPECT_EQ(cut(0, 0).data().at(k), c);
    }
  }
  EXPECT_LE(cut(0, 0).max_degree(), 4u);
}

}  // namespace
}  // namespace frg
