#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "fixtures.hpp"

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = docasref::cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fx(const std::string& name) { return testdata::fixture(name).string(); }

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("docasref_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

nlohmann::json first_pair() { return testdata::read_json(testdata::fixture("pair_goldens.json")).at("pairs")[3]; }

}  // namespace

TEST(CliScore, IdenticalFilesRougeIsOne) {
  TempDir dir;
  const auto f = dir.file("same.txt", "The cat sat on the mat. It slept all day.");
  const auto r = run({"score", "--metric", "rouge", "--variant", "r1", "--summary-file", f, "--document-file", f});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("f1").get<double>(), 1.0);
  EXPECT_EQ(j.at("metric").get<std::string>(), "rouge-1");
}

TEST(CliScore, FixtureBackendMatchesGolden) {
  const auto p = first_pair();
  const auto r = run({"score", "--metric", "bertscore", "--component", "p", "--backend", "fixture", "--fixture",
                      fx("pair_tokens.json"), "--summary", p.at("summary"), "--document", p.at("document")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const auto want = p.at("bertscore");
  EXPECT_NEAR(j.at("precision").get<double>(), want[0].get<double>(), 1e-4);
  EXPECT_NEAR(j.at("recall").get<double>(), want[1].get<double>(), 1e-4);
  EXPECT_NEAR(j.at("f1").get<double>(), want[2].get<double>(), 1e-4);
  EXPECT_EQ(j.at("value").get<double>(), j.at("precision").get<double>());
}

TEST(CliScore, OnnxBackendMatchesGolden) {
  const auto p = first_pair();
  auto r = run({"score", "--metric", "bertscore", "--model", fx("mini_encoder.json"), "--summary", p.at("summary"),
                "--document", p.at("document")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out).at("f1").get<double>(), p.at("bertscore")[2].get<double>(), 1e-4);

  r = run({"score", "--metric", "moverscore", "--model", fx("mini_encoder.json"), "--summary", p.at("summary"),
           "--document", p.at("document")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out).at("value").get<double>(), p.at("moverscore").get<double>(), 1e-4);

  r = run({"score", "--metric", "bertscore", "--idf", "on", "--idf-corpus", fx("bench.jsonl"), "--model",
           fx("mini_encoder.json"), "--summary", p.at("summary"), "--document", p.at("document")});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(CliScore, SentenceNliAndLeadword) {
  const auto p = first_pair();
  auto r = run({"score", "--metric", "sentbert", "--sim-kind", "nli_EmC", "--weighting", "entropy", "--model",
                fx("mini_nli.json"), "--summary", p.at("summary"), "--document", p.at("document")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out).at("metric").get<std::string>(), "sentbert-nli_EmC-entropy");

  r = run({"score", "--metric", "rouge-l", "--leadword", "0.5", "--summary", "One a.", "--document",
           "One a. Two b. Three c. Four d."});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("recall").get<double>(), 2.0 / 4.0, 1e-12);
  EXPECT_EQ(j.at("metric").get<std::string>(), "rouge-l@lead0.5");
}

TEST(CliScore, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"score", "--metric", "bertscore", "--backend", "onnx", "--summary", "a", "--document", "b"}).code, 2);
  auto r = run({"score", "--metric", "bertscore", "--model", "/no/such/model.json", "--summary", "a", "--document",
                "b"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--model"), std::string::npos) << r.err;
  EXPECT_EQ(run({"score", "--metric", "bleu", "--summary", "a", "--document", "b"}).code, 2);
  EXPECT_EQ(run({"score", "--metric", "rouge", "--summary", "a", "--summary-file", "x", "--document", "b"}).code, 2);
  EXPECT_EQ(run({"score", "--metric", "rouge", "--document", "b"}).code, 2);
  EXPECT_EQ(run({"score", "--metric", "rouge", "--component", "q", "--summary", "a", "--document", "b"}).code, 2);
  EXPECT_EQ(run({"score", "--metric", "rouge", "--leadword", "2", "--summary", "a", "--document", "b"}).code, 2);
  EXPECT_EQ(run({"score", "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliScore, BackendFailureExitsOne) {
  const auto r = run({"score", "--metric", "bertscore", "--backend", "fixture", "--fixture", fx("pair_tokens.json"),
                      "--summary", "never embedded", "--document", "also never embedded"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliBenchmark, FixtureSuiteReproducesGoldenReport) {
  TempDir dir;
  const auto out = dir.path("report.md");
  const auto r = run({"benchmark", "--suite", fx("bench_suite.json"), "--format", "markdown", "--output", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(testdata::read_file(out), testdata::read_file(testdata::fixture("bench_report.md")));
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("rows").get<int>(), 14);
  const auto report = testdata::read_file(out);
  EXPECT_NE(report.find("| blanc-ext | scalar |"), std::string::npos);
}

TEST(CliBenchmark, ConfigErrors) {
  TempDir dir;
  auto suite = testdata::read_json(testdata::fixture("bench_suite.json"));
  suite["dataset"] = fx("bench.jsonl");
  suite["backend"]["fixtures"] = {fx("bench_tokens.json")};
  suite["metrics"] = nlohmann::json::array({{{"name", "bleurt"}}});
  auto r = run({"benchmark", "--suite", dir.file("bad.json", suite.dump())});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bleurt"), std::string::npos) << r.err;

  EXPECT_EQ(run({"benchmark", "--suite", dir.path("missing.json")}).code, 2);
  EXPECT_EQ(run({"benchmark", "--suite", dir.file("broken.json", "{")}).code, 2);

  suite["metrics"] = nlohmann::json::array({{{"name", "bertscore"}}});
  suite["backend"] = {{"kind", "onnx"}, {"models", {{"mini", fx("mini_encoder.json")}}}};
  suite["metrics"][0]["model"] = "other";
  EXPECT_EQ(run({"benchmark", "--suite", dir.file("unknown_model.json", suite.dump())}).code, 2);
}

TEST(CliBenchmark, OnnxSuiteRuns) {
  TempDir dir;
  nlohmann::json suite = {
      {"dataset", fx("bench.jsonl")},
      {"backend", {{"kind", "onnx"}, {"models", {{"mini", fx("mini_encoder.json")}}}}},
      {"workers", 2},
      {"metrics", {{{"name", "bertscore"}, {"component", "f"}}, {{"name", "rouge-1"}, {"component", "r"}}}},
      {"output", {{"format", "csv"}, {"path", dir.path("onnx.csv")}}}};
  const auto r = run({"benchmark", "--suite", dir.file("onnx_suite.json", suite.dump())});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto golden = testdata::read_file(testdata::fixture("bench_report.csv"));
  const auto got = testdata::read_file(dir.path("onnx.csv"));
  std::istringstream lines(got);
  std::string line;
  while (std::getline(lines, line)) EXPECT_NE(golden.find(line + "\n"), std::string::npos) << line;
}

TEST(CliFixtures, VerifyCommittedAndPerturbed) {
  auto r = run({"fixtures", "verify", "--fixture", fx("pair_tokens.json"), "--model", fx("mini_encoder.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(nlohmann::json::parse(r.out).at("max_deviation").get<double>(), 1e-4);

  TempDir dir;
  auto j = testdata::read_json(testdata::fixture("pair_tokens.json"));
  const auto id = j["items"][5]["id"].get<std::string>();
  j["items"][5]["vectors"][2][7] = j["items"][5]["vectors"][2][7].get<double>() + 0.01;
  r = run({"fixtures", "verify", "--fixture", dir.file("perturbed.json", j.dump()), "--model",
           fx("mini_encoder.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(id), std::string::npos) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out).at("failing"), nlohmann::json::array({id}));

  r = run({"fixtures", "verify", "--fixture", fx("pair_tokens.json"), "--model", dir.path("nope.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(run({"fixtures", "verify", "--fixture", fx("pair_tokens.json")}).code, 2);
}
