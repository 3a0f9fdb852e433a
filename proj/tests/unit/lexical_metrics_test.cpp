#include <gtest/gtest.h>

#include <random>

#include "docasref/lexical_metrics.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace docasref;
using Tokens = std::vector<std::string>;

TEST(RougeN, HandCountWithClipping) {
  const Tokens cand = {"the", "cat", "sat"};
  const Tokens ref = {"the", "cat", "sat", "on", "the", "mat"};
  const auto t = rouge_n(cand, ref, 1);
  EXPECT_DOUBLE_EQ(t.recall, 0.5);
  EXPECT_DOUBLE_EQ(t.precision, 1.0);
  const auto clipped = rouge_n({"the", "the", "the"}, ref, 1);
  EXPECT_DOUBLE_EQ(clipped.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(clipped.recall, 2.0 / 6.0);
}

TEST(RougeN, IdentityAndEmpty) {
  const Tokens a = {"a", "b", "c", "a"};
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto t = rouge_n(a, a, n);
    EXPECT_DOUBLE_EQ(t.f1, 1.0);
  }
  EXPECT_DOUBLE_EQ(rouge_n({"a"}, {"a", "b"}, 2).f1, 0.0);
  EXPECT_DOUBLE_EQ(rouge_n({}, {"a"}, 1).recall, 0.0);
}

TEST(RougeN, KeysDoNotCollide) {
  EXPECT_DOUBLE_EQ(rouge_n({"a b", "c"}, {"a", "b c"}, 2).f1, 0.0);
  EXPECT_EQ(ngrams({"x", "y", "x", "y"}, 2).counts.size(), 2u);
  EXPECT_EQ(ngrams({"x", "y", "x", "y"}, 2).total, 3u);
}

TEST(RougeN, MatchesCountingOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = oracle::random_tokens(rng, 12, 5);
    const auto b = oracle::random_tokens(rng, 12, 5);
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto got = rouge_n(a, b, n);
      const auto want = oracle::rouge_n(a, b, n);
      EXPECT_EQ(got.precision, want.p);
      EXPECT_EQ(got.recall, want.r);
      EXPECT_EQ(got.f1, want.f);
    }
  }
}

TEST(RougeL, HandLcs) {
  const Tokens cand = {"the", "cat", "sat"};
  const Tokens ref = {"the", "cat", "sat", "on", "the", "mat"};
  EXPECT_EQ(lcs_length(cand, ref), 3u);
  EXPECT_DOUBLE_EQ(rouge_l(cand, ref).recall, 0.5);
  EXPECT_EQ(lcs_length({"a", "b", "c", "b", "d", "a", "b"}, {"b", "d", "c", "a", "b", "a"}), 4u);
}

TEST(RougeL, DisjointIsZero) {
  const auto t = rouge_l({"a", "b"}, {"c", "d"});
  EXPECT_EQ(t.precision, 0.0);
  EXPECT_EQ(t.recall, 0.0);
  EXPECT_EQ(t.f1, 0.0);
}

TEST(RougeL, MatchesSubsequenceOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = oracle::random_tokens(rng, 12, 5);
    const auto b = oracle::random_tokens(rng, 12, 5);
    EXPECT_EQ(lcs_length(a, b), oracle::lcs_exhaustive(a, b));
    const auto got = rouge_l(a, b);
    const auto want = oracle::rouge_l(a, b);
    EXPECT_EQ(got.precision, want.p);
    EXPECT_EQ(got.recall, want.r);
  }
}

TEST(RougeReffree, DocumentInReferenceSlot) {
  EXPECT_DOUBLE_EQ(rouge_reffree("the cat sat", "the cat sat on the mat", RougeVariant::r1).recall, 0.5);
  const std::string doc = "The cat sat on the mat. It slept.";
  for (auto v : {RougeVariant::r1, RougeVariant::r2, RougeVariant::rl}) {
    EXPECT_DOUBLE_EQ(rouge_reffree(doc, doc, v).recall, 1.0);
  }
}

TEST(RougeReffree, PairGoldens) {
  const auto golden = testdata::read_json(testdata::fixture("pair_goldens.json"));
  for (const auto& p : golden.at("pairs")) {
    const auto doc = p.at("document").get<std::string>();
    const auto sum = p.at("summary").get<std::string>();
    const std::pair<const char*, RougeVariant> keys[] = {
        {"rouge1", RougeVariant::r1}, {"rouge2", RougeVariant::r2}, {"rougeL", RougeVariant::rl}};
    for (const auto& [key, v] : keys) {
      const auto want = p.at(key).get<std::vector<double>>();
      const auto got = rouge_reffree(sum, doc, v);
      EXPECT_NEAR(got.precision, want[0], 1e-12) << key << " " << sum;
      EXPECT_NEAR(got.recall, want[1], 1e-12) << key << " " << sum;
      EXPECT_NEAR(got.f1, want[2], 1e-12) << key << " " << sum;
    }
  }
}

TEST(RougeVariantNames, ParseAndPrint) {
  EXPECT_EQ(parse_rouge_variant("rouge-l"), RougeVariant::rl);
  EXPECT_EQ(parse_rouge_variant("r2"), RougeVariant::r2);
  EXPECT_STREQ(to_string(RougeVariant::r1), "rouge-1");
  EXPECT_THROW(parse_rouge_variant("rouge-9"), Error);
}
