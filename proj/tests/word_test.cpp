#include <gtest/gtest.h>

#include <random>

#include "frg/word.hpp"
#include "test_support.hpp"

namespace frg {
namespace {

const Alphabet kLetters = Alphabet::standard(26);

Word W(const std::string& s) { return kLetters.parse(s); }

TEST(WordTest, Concatenation) {
  EXPECT_EQ(W("PA") + W("AR"), W("PAAR"));
  EXPECT_EQ(Word{} + W("W"), W("W"));
  EXPECT_EQ(W("AB") + W("BA"), W("ABBA"));
}

TEST(WordTest, NcDeriveExamples) {
  const Letter a = 0;
  TensorPairSum d = nc_derive(a, W("PAAR"));
  TensorPairSum expected{{{W("P"), W("AR")}, 1}, {{W("PA"), W("R")}, 1}};
  EXPECT_EQ(d, expected);

  TensorPairSum alg = nc_derive(a, W("ALGEBRA"));
  TensorPairSum expected_alg{{{Word{}, W("LGEBRA")}, 1}, {{W("ALGEBR"), Word{}}, 1}};
  EXPECT_EQ(alg, expected_alg);

  EXPECT_TRUE(nc_derive(a, W("BB")).empty());
}

TEST(WordTest, CyclicDeriveExamples) {
  auto d = cyclic_derive(0, W("PAAR"));
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].second, W("ARP"));
  EXPECT_EQ(d[1].second, W("RPA"));

  auto single = cyclic_derive(0, W("A"));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_TRUE(single[0].second.empty());
}

TEST(WordTest, CyclicDeriveMatchesExcision) {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 300; ++iter) {
    Word w = testing::random_word(rng, 3, 8);
    for (Letter a = 0; a < 3; ++a) {
      // Reference: excise each occurrence and read the remaining letters
      // starting right after it.
      std::vector<Word> expected;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] != a) continue;
        Word rest;
        for (std::size_t s = 1; s < w.size(); ++s) rest.push_back(w[(i + s) % w.size()]);
        expected.push_back(rest);
      }
      std::sort(expected.begin(), expected.end());
      auto got = cyclic_derive(a, w);
      ASSERT_EQ(got.size(), expected.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].first, 1);
        EXPECT_EQ(got[i].second, expected[i]);
      }
      EXPECT_EQ(got.size(), w.count(a));
      EXPECT_EQ(nc_derive(a, w).size(), w.count(a));

      // Same multiset for every rotation of the input.
      for (std::size_t k = 0; k < w.size(); ++k) EXPECT_EQ(cyclic_derive(a, w.rotated(k)), got);
    }
  }
}

TEST(WordTest, TrAbabDerivative) {
  auto d = cyclic_derive(0, W("ABAB"));
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].second, W("BAB"));
  EXPECT_EQ(d[1].second, W("BAB"));
}

TEST(WordTest, CanonicalRotation) {
  EXPECT_EQ(CyclicWord(W("BAB")).word(), W("ABB"));
  EXPECT_EQ(CyclicWord(W("AAA")).word(), W("AAA"));
  EXPECT_EQ(CyclicWord(W("CDFADE")).word(), W("ADECDF"));
  EXPECT_EQ(CyclicWord(Word{}).word(), Word{});
}

TEST(WordTest, CanonicalRotationMatchesBruteForce) {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 2000; ++iter) {
    Word w = testing::random_word(rng, 1 + iter % 4, 10);
    CyclicWord c(w);
    EXPECT_EQ(c.word(), testing::brute_least_rotation(w));
    for (std::size_t k = 0; k < w.size(); ++k) EXPECT_EQ(CyclicWord(w.rotated(k)), c);
    EXPECT_EQ(CyclicWord(c.word()), c);
  }
}

TEST(WordTest, AutomorphismOrder) {
  EXPECT_EQ(CyclicWord(W("AAAA")).automorphism_order(), 4u);
  EXPECT_EQ(CyclicWord(W("ABAB")).automorphism_order(), 2u);
  EXPECT_EQ(CyclicWord(W("ABC")).automorphism_order(), 1u);
}

TEST(WordTest, AlphabetFormatting) {
  Alphabet multi({"X1", "X2"});
  Word w{0, 1, 1};
  EXPECT_EQ(multi.format(w), "X1 X2 X2");
  EXPECT_EQ(multi.parse("X1 X2 X2"), w);
  EXPECT_EQ(Alphabet::standard(2).format(w), "ABB");
  EXPECT_THROW(multi.parse("X3"), std::invalid_argument);
}

}  // namespace
}  // namespace frg
