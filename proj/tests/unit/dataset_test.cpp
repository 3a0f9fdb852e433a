#include <gtest/gtest.h>

#include <sstream>

#include "docasref/dataset.hpp"
#include "fixtures.hpp"

using docasref::DatasetError;
using docasref::parse_dataset;

namespace {

const char* kSmall = R"({"kind": "meta", "name": "small", "aspects": ["relevance"]}
{"kind": "doc", "id": "a", "text": "First document."}
{"kind": "doc", "id": "b", "text": "Second document.", "group": "g"}
{"kind": "sum", "doc_id": "a", "system_id": "s1", "text": "x", "ratings": {"relevance": 1}}
{"kind": "sum", "doc_id": "a", "system_id": "s2", "text": "y", "ratings": {"relevance": 2}}
{"kind": "sum", "doc_id": "a", "system_id": "s3", "text": "z", "ratings": {"relevance": 3}}
{"kind": "sum", "doc_id": "b", "system_id": "s1", "text": "x", "ratings": {"relevance": 1}}
{"kind": "sum", "doc_id": "b", "system_id": "s2", "text": "y", "ratings": {"relevance": 2}}
{"kind": "sum", "doc_id": "b", "system_id": "s3", "text": "z", "ratings": {"relevance": 3}}
)";

docasref::Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const DatasetError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Dataset, CountsArePreserved) {
  const auto ds = parse(kSmall);
  EXPECT_EQ(ds.name, "small");
  EXPECT_EQ(ds.documents.size(), 2u);
  EXPECT_EQ(ds.summaries.size(), 6u);
  EXPECT_EQ(ds.summaries[3].doc_id, "b");
  EXPECT_EQ(ds.documents[1].doc_group, "g");
  EXPECT_FALSE(ds.documents[0].doc_group.has_value());
  ASSERT_NE(ds.find_document("b"), nullptr);
  EXPECT_EQ(ds.find_document("zz"), nullptr);
}

TEST(Dataset, DuplicateSummaryKeyIsNamed) {
  const std::string text = std::string(kSmall) +
                           R"({"kind": "sum", "doc_id": "a", "system_id": "s2", "text": "q", "ratings": {}})" "\n";
  const auto msg = error_of(text);
  EXPECT_NE(msg.find("line 10"), std::string::npos) << msg;
  EXPECT_NE(msg.find("(a, s2)"), std::string::npos) << msg;
}

TEST(Dataset, DuplicateDocumentId) {
  const auto msg = error_of(R"({"kind": "meta", "name": "x", "aspects": []}
{"kind": "doc", "id": "a", "text": "t"}
{"kind": "doc", "id": "a", "text": "u"}
)");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Dataset, MalformedInputs) {
  EXPECT_NE(error_of("{not json}\n").find("line 1"), std::string::npos);
  EXPECT_FALSE(error_of(R"({"kind": "doc", "id": "a", "text": "t"})" "\n").empty());
  EXPECT_FALSE(error_of(R"({"kind": "meta", "name": "x", "aspects": ["r"]}
{"kind": "sum", "doc_id": "missing", "system_id": "s", "text": "t", "ratings": {"r": 1}}
)").empty());
  EXPECT_FALSE(error_of(R"({"kind": "meta", "name": "x", "aspects": ["r"]}
{"kind": "doc", "id": "a", "text": "t"}
{"kind": "sum", "doc_id": "a", "system_id": "s", "text": "t", "ratings": {"other": 1}}
)").empty());
  EXPECT_FALSE(error_of(R"({"kind": "meta", "name": "x", "aspects": []}
{"kind": "doc", "id": "a", "text": "   "}
)").empty());
}

TEST(Dataset, SaveLoadRoundTrip) {
  const auto ds = parse(kSmall);
  std::ostringstream out;
  docasref::save_dataset(ds, out);
  const auto again = parse(out.str());
  ASSERT_EQ(again.summaries.size(), ds.summaries.size());
  for (std::size_t i = 0; i < ds.summaries.size(); ++i) {
    EXPECT_EQ(again.summaries[i].doc_id, ds.summaries[i].doc_id);
    EXPECT_EQ(again.summaries[i].system_id, ds.summaries[i].system_id);
    EXPECT_EQ(again.summaries[i].ratings, ds.summaries[i].ratings);
  }
  EXPECT_EQ(again.aspects, ds.aspects);
}

TEST(Dataset, CommittedBench) {
  const auto ds = docasref::load_dataset(testdata::fixture("bench.jsonl"));
  EXPECT_EQ(ds.name, "bench");
  EXPECT_EQ(ds.documents.size(), 6u);
  EXPECT_EQ(ds.summaries.size(), 20u);
  EXPECT_THROW(docasref::load_dataset(testdata::fixture("no_such.jsonl")), DatasetError);
}
