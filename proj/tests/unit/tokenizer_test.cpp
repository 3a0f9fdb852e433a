#include <gtest/gtest.h>

#include "docasref/tokenizer.hpp"
#include "fixtures.hpp"

using docasref::Encoding;
using docasref::SubwordTokenizer;

namespace {

void check_cases(const SubwordTokenizer& tok, const nlohmann::json& cases) {
  const auto second = tok.tokenize("the cat");
  for (const auto& c : cases) {
    const auto text = c.at("text").get<std::string>();
    const auto enc = tok.tokenize(text);
    EXPECT_EQ(enc.tokens, c.at("tokens").get<std::vector<std::string>>()) << text;
    EXPECT_EQ(enc.ids, c.at("ids").get<std::vector<std::int64_t>>()) << text;
    EXPECT_EQ(tok.add_special_tokens(enc).ids, c.at("special_ids").get<std::vector<std::int64_t>>()) << text;
    const auto pair = tok.add_special_tokens(enc, &second);
    EXPECT_EQ(pair.ids, c.at("pair_ids").get<std::vector<std::int64_t>>()) << text;
    EXPECT_EQ(pair.type_ids, c.at("pair_type_ids").get<std::vector<std::int64_t>>()) << text;
  }
}

}  // namespace

TEST(Tokenizer, WordPieceMatchesReferenceLibrary) {
  const auto tok = SubwordTokenizer::from_file(testdata::fixture("tokenizer.json"));
  check_cases(tok, testdata::read_json(testdata::data("tokenizer_cases.json")).at("wordpiece"));
}

TEST(Tokenizer, ByteLevelBpeMatchesReferenceLibrary) {
  const auto tok = SubwordTokenizer::from_file(testdata::data("bpe_tokenizer.json"));
  check_cases(tok, testdata::read_json(testdata::data("tokenizer_cases.json")).at("bpe"));
}

TEST(Tokenizer, SpecialTokenMarksAndCounts) {
  const auto tok = SubwordTokenizer::from_file(testdata::fixture("tokenizer.json"));
  const auto enc = tok.add_special_tokens(tok.tokenize("the cat"));
  ASSERT_EQ(enc.size(), enc.special.size());
  EXPECT_TRUE(enc.special.front());
  EXPECT_TRUE(enc.special.back());
  EXPECT_FALSE(enc.special[1]);
  EXPECT_EQ(tok.num_special_tokens(false), 2u);
  EXPECT_EQ(tok.num_special_tokens(true), 3u);
  EXPECT_EQ(tok.token_to_id("[CLS]"), enc.ids.front());
  EXPECT_FALSE(tok.token_to_id("no-such-token").has_value());
}

TEST(Tokenizer, WordPieceFromInlineJson) {
  const auto tok = SubwordTokenizer::from_json(R"({
    "normalizer": {"type": "BertNormalizer", "lowercase": true},
    "pre_tokenizer": {"type": "BertPreTokenizer"},
    "post_processor": {"type": "BertProcessing", "sep": ["[SEP]", 3], "cls": ["[CLS]", 2]},
    "model": {"type": "WordPiece", "unk_token": "[UNK]", "continuing_subword_prefix": "##",
              "vocab": {"[PAD]": 0, "[UNK]": 1, "[CLS]": 2, "[SEP]": 3, "un": 4, "##aff": 5, "##able": 6, "!": 7}}
  })");
  const auto enc = tok.tokenize("Unaffable!");
  EXPECT_EQ(enc.tokens, (std::vector<std::string>{"un", "##aff", "##able", "!"}));
  EXPECT_EQ(tok.tokenize("xyz").tokens, (std::vector<std::string>{"[UNK]"}));
  EXPECT_EQ(tok.add_special_tokens(enc).ids, (std::vector<std::int64_t>{2, 4, 5, 6, 7, 3}));
  EXPECT_EQ(tok.vocab_size(), 8u);
}

TEST(Tokenizer, EncodingSliceAndHead) {
  Encoding e;
  for (int i = 0; i < 5; ++i) e.append("t" + std::to_string(i), i, 0, false);
  EXPECT_EQ(e.head(2).tokens, (std::vector<std::string>{"t0", "t1"}));
  EXPECT_EQ(e.slice(1, 4).ids, (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_EQ(e.head(10).size(), 5u);
}

TEST(Tokenizer, RejectsUnsupportedDefinitions) {
  EXPECT_THROW(SubwordTokenizer::from_json("not json"), docasref::Error);
  EXPECT_THROW(SubwordTokenizer::from_json(R"({"model": {"type": "Unigram", "vocab": []}})"), docasref::Error);
}

TEST(Utf8, DecodeEncodeRoundTrip) {
  const std::string s = "caf\xC3\xA9 \xE2\x82\xAC \xF0\x9F\x98\x80";
  const auto cps = docasref::utf8::decode(s);
  EXPECT_EQ(cps.size(), 8u);
  EXPECT_EQ(cps[3], U'é');
  EXPECT_EQ(docasref::utf8::encode(cps), s);
  EXPECT_EQ(docasref::utf8::decode("\xFF").front(), U'�');
}
