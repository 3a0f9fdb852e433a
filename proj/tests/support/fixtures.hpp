#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "docasref/fixture_store.hpp"
#include "docasref/onnx_backend.hpp"
#include "json.hpp"

namespace testdata {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(DOCASREF_FIXTURE_DIR) / name;
}

inline std::filesystem::path data(const std::string& name) {
  return std::filesystem::path(DOCASREF_TEST_DATA_DIR) / name;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(read_file(p)); }

// Every committed embedding and NLI fixture in one store.
inline std::shared_ptr<const docasref::FixtureStore> store() {
  static const auto s = [] {
    auto st = std::make_shared<docasref::FixtureStore>();
    for (const char* f : {"pair_tokens.json", "pair_sentences.json", "bench_tokens.json", "cat_golden.json"}) {
      st->add_file(fixture(f));
    }
    st->add_nli_file(fixture("pair_nli.json"));
    return std::shared_ptr<const docasref::FixtureStore>(st);
  }();
  return s;
}

inline docasref::FixtureBackend fixture_backend() { return docasref::FixtureBackend(store()); }

inline std::shared_ptr<const docasref::OnnxModel> encoder() {
  static const auto m = docasref::OnnxModel::load(docasref::load_model_config(fixture("mini_encoder.json")));
  return m;
}

inline std::shared_ptr<const docasref::OnnxModel> nli_model() {
  static const auto m = docasref::OnnxModel::load(docasref::load_model_config(fixture("mini_nli.json")));
  return m;
}

}  // namespace testdata
