#include <gtest/gtest.h>

#include "docasref/text.hpp"
#include "fixtures.hpp"

using docasref::split_sentences;
using docasref::word_tokenize;
using Strings = std::vector<std::string>;

TEST(SplitSentences, TerminalPunctuation) {
  EXPECT_EQ(split_sentences("A. B? C!"), (Strings{"A.", "B?", "C!"}));
}

TEST(SplitSentences, EmptyAndBlank) {
  EXPECT_TRUE(split_sentences("").empty());
  EXPECT_TRUE(split_sentences("  \n\t ").empty());
}

TEST(SplitSentences, TitleAbbreviation) {
  EXPECT_EQ(split_sentences("Dr. Smith left. He returned."), (Strings{"Dr. Smith left.", "He returned."}));
}

TEST(SplitSentences, NoTerminalPunctuation) {
  EXPECT_EQ(split_sentences("  no full stop here  "), (Strings{"no full stop here"}));
}

TEST(SplitSentences, HandLabeledCorpus) {
  const auto corpus = testdata::read_json(testdata::data("sentences_hand_labeled.json"));
  std::size_t total = 0;
  for (const auto& entry : corpus) {
    const auto text = entry.at("text").get<std::string>();
    const auto expected = entry.at("sentences").get<Strings>();
    total += expected.size();
    EXPECT_EQ(split_sentences(text), expected) << text;
  }
  EXPECT_EQ(total, 50u);
}

TEST(SplitSentences, JoinRoundTrip) {
  const std::string text = "One cat sat. Two dogs ran! Did the bird sing?";
  const auto parts = split_sentences(text);
  EXPECT_EQ(docasref::join_sentences(parts), text);
}

TEST(WordTokenize, LowercaseAndStripPunctuation) {
  EXPECT_EQ(word_tokenize("The cat sat."), (Strings{"the", "cat", "sat"}));
}

TEST(WordTokenize, Hyphens) {
  EXPECT_EQ(word_tokenize("state-of-the-art"), (Strings{"state", "of", "the", "art"}));
}

TEST(WordTokenize, Empty) { EXPECT_TRUE(word_tokenize("").empty()); }

TEST(WordTokenize, DigitsAndUtf8) {
  EXPECT_EQ(word_tokenize("Won 3-1, café!"), (Strings{"won", "3", "1", "café"}));
}

TEST(WordTokenize, HandTokenizedSentences) {
  EXPECT_EQ(word_tokenize("Dr. Smith will lead the team at the new clinic."),
            (Strings{"dr", "smith", "will", "lead", "the", "team", "at", "the", "new", "clinic"}));
  EXPECT_EQ(word_tokenize("\"We are ready,\" the coach said (again)."),
            (Strings{"we", "are", "ready", "the", "coach", "said", "again"}));
  EXPECT_EQ(word_tokenize("Prices rose by 3.5 percent."), (Strings{"prices", "rose", "by", "3", "5", "percent"}));
}
