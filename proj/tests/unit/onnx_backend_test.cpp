#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "docasref/onnx_backend.hpp"
#include "fixtures.hpp"

using namespace docasref;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) worst = std::max(worst, std::abs(a.values()[k] - b.values()[k]));
  return worst;
}

std::string long_text(int words) {
  std::string s;
  for (int i = 0; i < words; ++i) s += (i % 3 == 0) ? "the council " : "approved budget ";
  return s;
}

}  // namespace

TEST(OnnxModel, Structure) {
  const auto enc = testdata::encoder();
  EXPECT_TRUE(enc->is_encoder());
  EXPECT_FALSE(enc->is_classifier());
  EXPECT_EQ(enc->num_layers(), 2);
  EXPECT_EQ(enc->layer(), 2);
  EXPECT_EQ(enc->model_id(), "mini-encoder");
  EXPECT_TRUE(testdata::nli_model()->is_classifier());
}

TEST(OnnxBackend, CatGoldenMatrix) {
  OnnxBackend b(testdata::encoder());
  const auto golden = read_fixture_file(testdata::fixture("cat_golden.json"));
  const auto& want = golden.items.at(0).sequence;
  const auto got = b.embed_tokens("the cat sat on the mat");
  EXPECT_EQ(got.tokens, want.tokens);
  ASSERT_EQ(got.vectors.rows(), want.vectors.rows());
  ASSERT_EQ(got.vectors.cols(), want.vectors.cols());
  EXPECT_LE(max_abs_diff(got.vectors, want.vectors), 1e-4);
  EXPECT_EQ(got.layer, 2);
  EXPECT_EQ(got.model_id, "mini-encoder");
}

TEST(OnnxBackend, CommittedFixturesReproduce) {
  OnnxBackend b(testdata::encoder());
  for (const char* name : {"pair_tokens.json", "pair_sentences.json", "bench_tokens.json"}) {
    const auto f = read_fixture_file(testdata::fixture(name));
    for (const auto& item : f.items) {
      ASSERT_TRUE(item.text.has_value()) << item.id;
      const auto got = b.embed_tokens(*item.text);
      ASSERT_EQ(got.tokens, item.sequence.tokens) << item.id;
      EXPECT_LE(max_abs_diff(got.vectors, item.sequence.vectors), 1e-4) << name << " " << item.id;
    }
  }
}

TEST(OnnxBackend, ShapeContractAndUnitRows) {
  OnnxBackend b(testdata::encoder());
  const std::string text = "The council approved a budget with more money for parks and schools.";
  const auto k = b.tokenize(text).size();
  const auto seq = b.embed_tokens(text);
  EXPECT_EQ(seq.size(), k);
  EXPECT_EQ(seq.vectors.rows(), k);
  EXPECT_NO_THROW(seq.validate(true));
}

TEST(OnnxBackend, Deterministic) {
  OnnxBackend a(testdata::encoder());
  OnnxBackend b(testdata::encoder());
  const std::string text = "Heavy rain flooded the river valley overnight.";
  EXPECT_TRUE(a.embed_tokens(text).vectors == a.embed_tokens(text).vectors);
  EXPECT_TRUE(a.embed_tokens(text).vectors == b.embed_tokens(text).vectors);
}

TEST(OnnxBackend, SentenceEmbedding) {
  OnnxBackend b(testdata::encoder());
  const auto tok = b.embed_tokens("the");
  ASSERT_EQ(tok.size(), 1u);
  const auto v = b.embed_sentence("the");
  for (std::size_t d = 0; d < v.size(); ++d) EXPECT_NEAR(v[d], tok.vectors(0, d), 1e-12);

  const std::string s = "The plan adds money for parks and schools.";
  EXPECT_NEAR(cosine(b.embed_sentence(s), b.embed_sentence(s)), 1.0, 1e-6);

  const auto g = testdata::read_json(testdata::fixture("pair_goldens.json")).at("sentence_cosine");
  const double c = cosine(b.embed_sentence(g.at("left").get<std::string>()),
                          b.embed_sentence(g.at("right").get<std::string>()));
  EXPECT_NEAR(c, g.at("cosine").get<double>(), 1e-4);
}

TEST(OnnxBackend, LongInputTruncateAndWindow) {
  auto cfg = load_model_config(testdata::fixture("mini_encoder.json"));
  OnnxBackend trunc(cfg);
  cfg.long_input_mode = LongInputMode::window;
  OnnxBackend window(cfg);
  const auto text = long_text(150);
  const auto all_tokens = window.tokenize(text).size();
  ASSERT_GT(all_tokens, 126u);

  const auto t = trunc.embed_tokens(text);
  EXPECT_EQ(t.size(), 126u);
  EXPECT_EQ(trunc.tokenize(text).size(), 126u);

  const auto w = window.embed_tokens(text);
  EXPECT_EQ(w.size(), all_tokens);
  EXPECT_NO_THROW(w.validate(true));
  for (std::size_t r = 0; r < t.size(); ++r) {
    for (std::size_t d = 0; d < t.dim(); ++d) ASSERT_EQ(w.vectors(r, d), t.vectors(r, d));
  }
  EXPECT_NE(trunc.cache_key(), window.cache_key());
}

TEST(OnnxBackend, Errors) {
  OnnxBackend enc(testdata::encoder());
  EXPECT_THROW(enc.embed_tokens("   "), BackendError);
  EXPECT_THROW(enc.nli_probs("a", "b"), BackendError);

  auto cfg = load_model_config(testdata::fixture("mini_encoder.json"));
  cfg.layer = 7;
  EXPECT_THROW(OnnxModel::load(cfg), BackendError);

  auto nli = load_model_config(testdata::fixture("mini_nli.json"));
  nli.nli_label_order.reset();
  EXPECT_THROW(OnnxModel::load(nli), BackendError);

  auto missing = load_model_config(testdata::fixture("mini_encoder.json"));
  missing.encoder_path = testdata::fixture("absent.onnx");
  EXPECT_THROW(OnnxModel::load(missing), BackendError);
}

TEST(OnnxNli, GoldensAndSelfEntailment) {
  OnnxBackend b(testdata::nli_model());
  const auto g = testdata::read_json(testdata::fixture("pair_goldens.json")).at("nli");
  const auto d = b.nli_probs(g.at("premise").get<std::string>(), g.at("hypothesis").get<std::string>());
  const auto want = g.at("probs").get<std::vector<double>>();
  EXPECT_NEAR(d.entail, want[0], 1e-4);
  EXPECT_NEAR(d.neutral, want[1], 1e-4);
  EXPECT_NEAR(d.contradict, want[2], 1e-4);
  EXPECT_NEAR(d.entail + d.neutral + d.contradict, 1.0, 1e-5);

  const auto self = g.at("self");
  const auto s = self.at("text").get<std::string>();
  const auto ds = b.nli_probs(s, s);
  EXPECT_GT(ds.entail, ds.neutral);
  EXPECT_GT(ds.entail, ds.contradict);
}

TEST(OnnxNli, EveryCommittedPairWithinTolerance) {
  OnnxBackend b(testdata::nli_model());
  const auto rows = testdata::read_json(testdata::fixture("pair_nli.json")).at("pairs");
  ASSERT_FALSE(rows.empty());
  for (const auto& row : rows) {
    const auto p = row.at("premise").get<std::string>();
    const auto h = row.at("hypothesis").get<std::string>();
    const auto want = row.at("probs").get<std::vector<double>>();
    const auto d = b.nli_probs(p, h);
    EXPECT_NEAR(d.entail, want[0], 1e-4) << p << " | " << h;
    EXPECT_NEAR(d.neutral, want[1], 1e-4) << p << " | " << h;
    EXPECT_NEAR(d.contradict, want[2], 1e-4) << p << " | " << h;
  }
}
