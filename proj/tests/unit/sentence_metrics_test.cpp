#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "docasref/sentence_metrics.hpp"
#include "docasref/text.hpp"
#include "fixtures.hpp"

using namespace docasref;

namespace {

nlohmann::json pairs() { return testdata::read_json(testdata::fixture("pair_goldens.json")).at("pairs"); }

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) m(i, j) = u(rng);
  }
  return m;
}

MetricValue constant_metric(double v) { return MetricValue::of(v); }

}  // namespace

TEST(SentSimMatrix, SingleSentenceCosine) {
  auto b = testdata::fixture_backend();
  const std::vector<std::string> s = {"The city council approved a new budget on Monday."};
  const auto m = sent_sim_matrix(s, s, {}, b);
  ASSERT_EQ(m.rows(), 1u);
  EXPECT_NEAR(m(0, 0), 1.0, 1e-6);
}

TEST(SentSimMatrix, NliArithmetic) {
  const NliDistribution d{0.7, 0.2, 0.1};
  EXPECT_NEAR(nli_similarity(d, SentenceSimKind::nli_EmC), 0.6, 1e-12);
  EXPECT_NEAR(nli_similarity(d, SentenceSimKind::nli_1mN), 0.8, 1e-12);
  EXPECT_NEAR(nli_similarity(d, SentenceSimKind::nli_E), 0.7, 1e-12);
  EXPECT_THROW(nli_similarity(d, SentenceSimKind::cosine), Error);
}

TEST(SentSimMatrix, ThreeByTwoAgainstCommittedCosines) {
  auto b = testdata::fixture_backend();
  const auto g = testdata::read_json(testdata::fixture("pair_goldens.json")).at("sentence_cosine");
  const auto doc = split_sentences(pairs()[0].at("document").get<std::string>());
  const std::vector<std::string> left(doc.begin(), doc.begin() + 3);
  const std::vector<std::string> right = {g.at("right").get<std::string>(),
                                          pairs()[0].at("summary").get<std::string>()};
  ASSERT_EQ(left[0], g.at("left").get<std::string>());
  const auto m = sent_sim_matrix(left, right, {}, b);
  ASSERT_EQ(m.rows(), 3u);
  ASSERT_EQ(m.cols(), 2u);
  EXPECT_NEAR(m(0, 0), g.at("cosine").get<double>(), 1e-4);
  EXPECT_NEAR(m(1, 0), 1.0, 1e-6);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_NEAR(m(i, j), cosine(b.embed_sentence(left[i]), b.embed_sentence(right[j])), 1e-12);
    }
  }
}

TEST(SentSimMatrix, NliOrientationPremiseIsLeft) {
  auto b = testdata::fixture_backend();
  const auto row = testdata::read_json(testdata::fixture("pair_nli.json")).at("pairs")[1];
  const std::vector<std::string> l = {row.at("premise").get<std::string>()};
  const std::vector<std::string> r = {row.at("hypothesis").get<std::string>()};
  SentenceSimConfig cfg;
  cfg.sim_kind = SentenceSimKind::nli_E;
  EXPECT_NEAR(sent_sim_matrix(l, r, cfg, b)(0, 0), row.at("probs")[0].get<double>(), 1e-12);
}

TEST(DocWeights, UniformOffDiagonal) {
  Matrix m(3, 3, 0.5);
  for (std::size_t i = 0; i < 3; ++i) m(i, i) = 1.0;
  EXPECT_EQ(doc_sentence_weights(m, SentenceWeighting::sum), (std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_EQ(doc_sentence_weights(Matrix(1, 1, 1.0), SentenceWeighting::sum), (std::vector<double>{1.0}));
  EXPECT_EQ(doc_sentence_weights(Matrix(1, 1, 1.0), SentenceWeighting::entropy), (std::vector<double>{1.0}));
  EXPECT_THROW(doc_sentence_weights(Matrix(2, 3), SentenceWeighting::sum), Error);
}

TEST(DocWeights, RandomAgainstDirectFormula) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_matrix(rng, 4, 4);
    const auto sum = doc_sentence_weights(m, SentenceWeighting::sum);
    const auto ent = doc_sentence_weights(m, SentenceWeighting::entropy);
    for (std::size_t i = 0; i < 4; ++i) {
      double s = 0.0, z = 0.0;
      for (std::size_t j = 0; j < 4; ++j) {
        if (j == i) continue;
        s += m(i, j);
        z += m(i, j) + 1.0;
      }
      double h = 0.0;
      for (std::size_t j = 0; j < 4; ++j) {
        if (j == i) continue;
        const double q = (m(i, j) + 1.0) / z;
        if (q > 0.0) h -= q * std::log(q);
      }
      EXPECT_NEAR(sum[i], s, 1e-12);
      EXPECT_NEAR(ent[i], h, 1e-12);
    }
  }
}

TEST(SummaryVotes, Arithmetic) {
  Matrix c(2, 1);
  c(0, 0) = 0.2;
  c(1, 0) = 0.4;
  const std::vector<double> w = {1.0, 1.0};
  const auto v = summary_sentence_votes(w, c);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NEAR(v[0], 0.6, 1e-12);
  const std::vector<double> zeros = {0.0, 0.0};
  EXPECT_EQ(summary_sentence_votes(zeros, c), (std::vector<double>{0.0}));
  const std::vector<double> three = {1.0, 1.0, 1.0};
  EXPECT_THROW(summary_sentence_votes(three, c), Error);
}

TEST(SummaryVotes, RandomAgainstMatrixVectorProduct) {
  std::mt19937_64 rng(22);
  const auto c = random_matrix(rng, 3, 4);
  const std::vector<double> w = {0.3, -1.2, 2.5};
  const auto v = summary_sentence_votes(w, c);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(v[j], w[0] * c(0, j) + w[1] * c(1, j) + w[2] * c(2, j), 1e-12);
  }
}

TEST(PoolSentenceScores, ZeroWeightsFallBackToUniform) {
  Matrix self(2, 2, 0.0);
  Matrix cross(2, 2);
  cross(0, 0) = 0.9;
  cross(0, 1) = 0.1;
  cross(1, 0) = 0.2;
  cross(1, 1) = 0.6;
  SentenceWeights out;
  const auto weighted = pool_sentence_scores(cross, &self, SentenceWeighting::sum, &out);
  const auto plain = pool_sentence_scores(cross, nullptr, SentenceWeighting::none);
  EXPECT_EQ(out.doc_weights, (std::vector<double>{0.0, 0.0}));
  EXPECT_NEAR(weighted.precision, plain.precision, 1e-12);
  EXPECT_NEAR(weighted.recall, plain.recall, 1e-12);
  EXPECT_NEAR(plain.precision, (0.9 + 0.6) / 2.0, 1e-12);
  EXPECT_NEAR(plain.recall, (0.9 + 0.6) / 2.0, 1e-12);
}

TEST(PoolSentenceScores, EquidistantDocumentMatchesUnweighted) {
  std::mt19937_64 rng(23);
  for (auto g : {SentenceWeighting::sum, SentenceWeighting::entropy}) {
    Matrix self(4, 4, 0.35);
    const auto cross = random_matrix(rng, 4, 1);
    const auto a = pool_sentence_scores(cross, &self, g);
    const auto b = pool_sentence_scores(cross, nullptr, SentenceWeighting::none);
    EXPECT_NEAR(a.precision, b.precision, 1e-9);
    EXPECT_NEAR(a.recall, b.recall, 1e-9);
    EXPECT_NEAR(a.f1, b.f1, 1e-9);
  }
}

TEST(SentenceBertScore, IdentityIsOne) {
  auto b = testdata::fixture_backend();
  for (const auto& p : pairs()) {
    const auto doc = p.at("document").get<std::string>();
    const auto t = sentence_bertscore(doc, doc, {}, b);
    EXPECT_NEAR(t.precision, 1.0, 1e-6);
    EXPECT_NEAR(t.recall, 1.0, 1e-6);
    EXPECT_NEAR(t.f1, 1.0, 1e-6);
  }
}

TEST(SentenceBertScore, HandComputedTwoByOneSumWeighting) {
  auto b = testdata::fixture_backend();
  const auto sents = split_sentences(pairs()[0].at("document").get<std::string>());
  const std::string doc = sents[0] + " " + sents[1];
  const std::string summary = pairs()[0].at("summary").get<std::string>();
  const double s12 = cosine(b.embed_sentence(sents[0]), b.embed_sentence(sents[1]));
  const double c1 = cosine(b.embed_sentence(sents[0]), b.embed_sentence(summary));
  const double c2 = cosine(b.embed_sentence(sents[1]), b.embed_sentence(summary));
  // w = [s12, s12] normalizes to halves; the single vote normalizes to 1.
  const double p = std::max(c1, c2);
  const double r = 0.5 * c1 + 0.5 * c2;
  SentenceSimConfig cfg;
  cfg.weighting = SentenceWeighting::sum;
  const auto t = sentence_bertscore(summary, doc, cfg, b);
  EXPECT_NEAR(t.precision, p, 1e-6);
  EXPECT_NEAR(t.recall, r, 1e-6);
  EXPECT_NEAR(t.f1, 2 * p * r / (p + r), 1e-6);
  EXPECT_GT(s12, 0.0);
}

TEST(SentenceBertScore, PairGoldens) {
  auto b = testdata::fixture_backend();
  const std::pair<const char*, SentenceWeighting> keys[] = {{"sentence_cosine_none", SentenceWeighting::none},
                                                            {"sentence_cosine_sum", SentenceWeighting::sum},
                                                            {"sentence_cosine_entropy", SentenceWeighting::entropy}};
  for (const auto& p : pairs()) {
    for (const auto& [key, g] : keys) {
      SentenceSimConfig cfg;
      cfg.weighting = g;
      const auto t = sentence_bertscore(p.at("summary").get<std::string>(), p.at("document").get<std::string>(), cfg, b);
      const auto want = p.at(key).get<std::vector<double>>();
      EXPECT_NEAR(t.precision, want[0], 1e-4) << key;
      EXPECT_NEAR(t.recall, want[1], 1e-4) << key;
      EXPECT_NEAR(t.f1, want[2], 1e-4) << key;
    }
  }
}

TEST(SentenceBertScore, NliSimilarityRuns) {
  auto b = testdata::fixture_backend();
  const auto p = pairs()[1];
  for (auto kind : {SentenceSimKind::nli_1mN, SentenceSimKind::nli_EmC, SentenceSimKind::nli_E}) {
    SentenceSimConfig cfg;
    cfg.sim_kind = kind;
    cfg.weighting = SentenceWeighting::entropy;
    const auto t = sentence_bertscore(p.at("summary").get<std::string>(), p.at("document").get<std::string>(), cfg, b);
    EXPECT_TRUE(std::isfinite(t.f1));
    EXPECT_LE(t.precision, 1.0 + 1e-12);
    EXPECT_GE(t.precision, -1.0 - 1e-12);
  }
}

TEST(Leadword, Laws) {
  const Document four{"d", "One a. Two b. Three c. Four d.", std::nullopt};
  EXPECT_EQ(leadword_filter(four, 0.5).text, "One a. Two b.");
  EXPECT_EQ(leadword_filter(four, 1.0).text, four.text);
  EXPECT_EQ(leadword_filter(four, 0.01).text, "One a.");
  const Document five{"d", "A one. B two. C three. D four. E five.", std::nullopt};
  EXPECT_EQ(split_sentences(leadword_filter(five, 0.5).text).size(), 3u);
  std::string ten;
  for (int i = 0; i < 10; ++i) ten += "Sentence number " + std::to_string(i) + " ends. ";
  EXPECT_EQ(split_sentences(leadword_filter({"t", ten, std::nullopt}, 0.3).text).size(), 3u);
  EXPECT_THROW(leadword_filter(four, 0.0), Error);
  EXPECT_THROW(leadword_filter(four, 1.5), Error);
  EXPECT_EQ(leadword_filter(four, 0.5).id, "d");
}

TEST(MultiDoc, SumOfParts) {
  const std::vector<Document> docs = {{"a", "x", std::nullopt}, {"b", "y", std::nullopt}};
  const PairwiseMetric metric = [](std::string_view, const Document& d) {
    return constant_metric(d.id == "a" ? 0.2 : 0.3);
  };
  EXPECT_NEAR(multi_doc_score(docs, "s", metric, Component::scalar), 0.5, 1e-12);
  EXPECT_NEAR(multi_doc_score(std::span(docs).first(1), "s", metric, Component::scalar), 0.2, 1e-12);
  EXPECT_THROW(multi_doc_score(std::span<const Document>(), "s", metric, Component::scalar), Error);
}

TEST(MultiDoc, ErrorsNameTheDocument) {
  const std::vector<Document> docs = {{"good", "x", std::nullopt}, {"bad", "y", std::nullopt}};
  const PairwiseMetric metric = [](std::string_view, const Document& d) -> MetricValue {
    if (d.id == "bad") throw Error("boom");
    return MetricValue::of(ScoreTriple::from_pr(1.0, 1.0));
  };
  try {
    multi_doc_score(docs, "s", metric, Component::f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("'bad'"), std::string::npos);
  }
  EXPECT_THROW(multi_doc_score(std::span(docs).first(1), "s", metric, Component::scalar), Error);
}
