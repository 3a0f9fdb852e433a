#include "docasref/fixture_store.hpp"

#include <cmath>
#include <fstream>

#include "docasref/text.hpp"
#include "json.hpp"

namespace docasref {
namespace {

using nlohmann::json;

[[noreturn]] void item_error(const std::string& id, const std::string& what) {
  throw BackendError("fixture item '" + id + "': " + what);
}

FixtureItem parse_item(const json& j, const FixtureFile& file, FixtureLoadOptions options) {
  if (!j.is_object()) throw BackendError("fixture items must be objects");
  if (!j.contains("id") || !j["id"].is_string()) throw BackendError("fixture item without a string id");
  FixtureItem item;
  item.id = j["id"].get<std::string>();
  if (j.contains("text") && j["text"].is_string()) item.text = j["text"].get<std::string>();

  const auto tokens = j.find("tokens");
  const auto vectors = j.find("vectors");
  if (tokens == j.end() || !tokens->is_array()) item_error(item.id, "missing 'tokens' array");
  if (vectors == j.end() || !vectors->is_array()) item_error(item.id, "missing 'vectors' array");
  for (const auto& t : *tokens) {
    if (!t.is_string()) item_error(item.id, "tokens must be strings");
    item.sequence.tokens.push_back(t.get<std::string>());
  }
  if (vectors->size() != item.sequence.tokens.size()) {
    item_error(item.id, std::to_string(vectors->size()) + " vectors for " +
                            std::to_string(item.sequence.tokens.size()) + " tokens");
  }
  Matrix m(vectors->size(), file.dim);
  for (std::size_t r = 0; r < vectors->size(); ++r) {
    const auto& row = (*vectors)[r];
    if (!row.is_array() || row.size() != file.dim) {
      item_error(item.id, "row " + std::to_string(r) + " has length " +
                              std::to_string(row.is_array() ? row.size() : 0) + ", expected " +
                              std::to_string(file.dim));
    }
    for (std::size_t c = 0; c < file.dim; ++c) {
      if (!row[c].is_number()) item_error(item.id, "non-numeric vector entry");
      m(r, c) = row[c].get<double>();
    }
  }
  item.sequence.vectors = std::move(m);
  if (auto idf = j.find("idf"); idf != j.end() && !idf->is_null()) {
    if (!idf->is_array()) item_error(item.id, "'idf' must be an array or null");
    std::vector<double> w;
    for (const auto& v : *idf) {
      if (!v.is_number()) item_error(item.id, "non-numeric idf entry");
      w.push_back(v.get<double>());
    }
    item.sequence.idf = std::move(w);
  }
  item.sequence.model_id = file.model_id;
  item.sequence.layer = file.layer;
  try {
    item.sequence.validate(options.require_unit_rows);
  } catch (const BackendError& e) {
    item_error(item.id, e.what());
  }
  return item;
}

}  // namespace

FixtureFile parse_fixture(std::istream& in, FixtureLoadOptions options) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw BackendError(std::string("fixture is not valid JSON: ") + e.what());
  }
  FixtureFile file;
  try {
    file.model_id = j.at("model_id").get<std::string>();
    file.layer = j.at("layer").get<int>();
    file.dim = j.at("dim").get<std::size_t>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("fixture header: ") + e.what());
  }
  const auto items = j.find("items");
  if (items == j.end() || !items->is_array()) throw BackendError("fixture has no 'items' array");
  for (const auto& it : *items) file.items.push_back(parse_item(it, file, options));
  return file;
}

FixtureFile read_fixture_file(const std::filesystem::path& path, FixtureLoadOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BackendError("cannot open fixture " + path.string());
  return parse_fixture(in, options);
}

void save_fixture(const FixtureFile& fixture, std::ostream& out) {
  json items = json::array();
  for (const auto& item : fixture.items) {
    const auto& seq = item.sequence;
    json rows = json::array();
    for (std::size_t r = 0; r < seq.vectors.rows(); ++r) {
      const auto row = seq.vectors.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    json obj{{"id", item.id}, {"tokens", seq.tokens}, {"vectors", std::move(rows)}};
    if (item.text) obj["text"] = *item.text;
    obj["idf"] = seq.idf ? json(*seq.idf) : json(nullptr);
    items.push_back(std::move(obj));
  }
  out << json{{"model_id", fixture.model_id},
              {"layer", fixture.layer},
              {"dim", fixture.dim},
              {"items", std::move(items)}}
             .dump()
      << '\n';
}

void save_fixture(const FixtureFile& fixture, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BackendError("cannot write fixture " + path.string());
  save_fixture(fixture, out);
}

std::map<std::string, EmbeddingSequence> load_fixture(const std::filesystem::path& path) {
  auto file = read_fixture_file(path);
  std::map<std::string, EmbeddingSequence> out;
  for (auto& item : file.items) {
    if (!out.emplace(item.id, std::move(item.sequence)).second) {
      throw BackendError("duplicate fixture item id '" + item.id + "'");
    }
  }
  return out;
}

void FixtureStore::add(const FixtureFile& fixture) {
  if (model_id_.empty()) {
    model_id_ = fixture.model_id;
  } else if (model_id_ != fixture.model_id) {
    throw BackendError("fixture model '" + fixture.model_id + "' does not match store model '" +
                       model_id_ + "'");
  }
  for (const auto& item : fixture.items) {
    if (!item.text) continue;
    by_text_.insert_or_assign(std::string(trim(*item.text)), item.sequence);
  }
}

void FixtureStore::add_file(const std::filesystem::path& path) { add(read_fixture_file(path)); }

void FixtureStore::add_nli_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BackendError("cannot open NLI fixture " + path.string());
  json j;
  try {
    j = json::parse(in);
    for (const auto& row : j.at("pairs")) {
      const auto probs = row.at("probs").get<std::vector<double>>();
      if (probs.size() != 3) throw BackendError("NLI fixture rows need three probabilities");
      NliDistribution d{probs[0], probs[1], probs[2]};
      if (std::abs(d.entail + d.neutral + d.contradict - 1.0) > 1e-5) {
        throw BackendError("NLI fixture probabilities do not sum to 1");
      }
      nli_.insert_or_assign(
          std::pair{std::string(trim(row.at("premise").get<std::string>())),
                    std::string(trim(row.at("hypothesis").get<std::string>()))},
          d);
    }
  } catch (const json::exception& e) {
    throw BackendError("NLI fixture " + path.string() + ": " + e.what());
  }
}

const EmbeddingSequence* FixtureStore::find(std::string_view text) const {
  auto it = by_text_.find(trim(text));
  return it == by_text_.end() ? nullptr : &it->second;
}

const NliDistribution* FixtureStore::find_nli(std::string_view premise, std::string_view hypothesis) const {
  auto it = nli_.find({std::string(trim(premise)), std::string(trim(hypothesis))});
  return it == nli_.end() ? nullptr : &it->second;
}

EmbeddingSequence FixtureBackend::embed_tokens(std::string_view text) {
  const auto* seq = store_->find(text);
  if (!seq) {
    throw BackendError("fixture backend has no embedding for text \"" +
                       std::string(text.substr(0, 60)) + (text.size() > 60 ? "..." : "") + "\"");
  }
  return *seq;
}

NliDistribution FixtureBackend::nli_probs(std::string_view premise, std::string_view hypothesis) {
  const auto* d = store_->find_nli(premise, hypothesis);
  if (!d) throw BackendError("fixture backend has no NLI entry for the requested sentence pair");
  return *d;
}

}  // namespace docasref
