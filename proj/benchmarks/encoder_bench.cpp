#include <benchmark/benchmark.h>

#include "docasref/onnx_backend.hpp"
#include "docasref/token_metrics.hpp"

using namespace docasref;

namespace {

const std::string kDocument =
    "The city council approved a new budget on Tuesday after weeks of debate. The plan raises spending on "
    "public transit and road repair, while trimming administrative costs. Council members who opposed it said "
    "the transit money relies on optimistic fare projections. The mayor is expected to sign the budget this week.";
const std::string kSummary = "The council passed a budget that boosts transit and road spending.";

std::shared_ptr<const OnnxModel> encoder() {
  static const auto model =
      OnnxModel::load(load_model_config(std::filesystem::path(DOCASREF_FIXTURE_DIR) / "mini_encoder.json"));
  return model;
}

}  // namespace

static void BM_OnnxEmbedDocument(benchmark::State& state) {
  OnnxBackend backend(encoder());
  for (auto _ : state) benchmark::DoNotOptimize(backend.embed_tokens(kDocument));
}
BENCHMARK(BM_OnnxEmbedDocument)->Unit(benchmark::kMillisecond);

static void BM_BertScoreEndToEnd(benchmark::State& state) {
  OnnxBackend backend(encoder());
  for (auto _ : state) benchmark::DoNotOptimize(bertscore_reffree(kSummary, kDocument, {}, backend));
}
BENCHMARK(BM_BertScoreEndToEnd)->Unit(benchmark::kMillisecond);
