#include "docasref/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"

namespace docasref {

void EmbeddingSequence::validate(bool require_unit_rows) const {
  if (vectors.rows() != tokens.size()) {
    throw BackendError("embedding has " + std::to_string(vectors.rows()) + " rows for " +
                       std::to_string(tokens.size()) + " tokens");
  }
  if (idf && idf->size() != tokens.size()) {
    throw BackendError("idf length " + std::to_string(idf->size()) + " != token count " +
                       std::to_string(tokens.size()));
  }
  for (double v : vectors.values()) {
    if (!std::isfinite(v)) throw BackendError("embedding contains a non-finite value");
  }
  if (idf) {
    for (double w : *idf) {
      if (!std::isfinite(w) || w < 0.0) throw BackendError("idf weights must be finite and non-negative");
    }
  }
  if (require_unit_rows) {
    for (std::size_t r = 0; r < vectors.rows(); ++r) {
      double sq = 0.0;
      for (double v : vectors.row(r)) sq += v * v;
      if (std::abs(std::sqrt(sq) - 1.0) > 1e-6) {
        throw BackendError("row " + std::to_string(r) + " is not unit-norm");
      }
    }
  }
}

void normalize_rows(Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    double sq = 0.0;
    for (double v : row) sq += v * v;
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0)) throw BackendError("cannot normalize a zero vector");
    for (double& v : row) v /= norm;
  }
}

NliLabel parse_nli_label(const std::string& name) {
  if (name == "entail" || name == "entailment") return NliLabel::entail;
  if (name == "neutral") return NliLabel::neutral;
  if (name == "contradict" || name == "contradiction") return NliLabel::contradict;
  throw Error("unknown NLI label '" + name + "'");
}

const char* to_string(NliLabel label) {
  switch (label) {
    case NliLabel::entail: return "entail";
    case NliLabel::neutral: return "neutral";
    case NliLabel::contradict: return "contradict";
  }
  return "?";
}

NliDistribution NliDistribution::from_logits(std::span<const double> logits,
                                             const std::array<NliLabel, 3>& order) {
  if (logits.size() != 3) {
    throw BackendError("classifier produced " + std::to_string(logits.size()) + " logits, expected 3");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::array<double, 3> e{};
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    e[i] = std::exp(logits[i] - top);
    total += e[i];
  }
  NliDistribution d;
  for (std::size_t i = 0; i < 3; ++i) {
    const double p = e[i] / total;
    switch (order[i]) {
      case NliLabel::entail: d.entail = p; break;
      case NliLabel::neutral: d.neutral = p; break;
      case NliLabel::contradict: d.contradict = p; break;
    }
  }
  return d;
}

std::optional<int> default_layer(const std::string& model_id) {
  // Per-checkpoint layer choices of the reference BERTScore implementation.
  static const std::map<std::string, int> kLayers = {
      {"roberta-base", 10},
      {"roberta-large", 17},
      {"roberta-large-mnli", 19},
      {"microsoft/deberta-base", 9},
      {"microsoft/deberta-base-mnli", 9},
      {"microsoft/deberta-large", 16},
      {"microsoft/deberta-large-mnli", 18},
      {"facebook/bart-base", 6},
      {"facebook/bart-large", 10},
      {"facebook/bart-large-mnli", 11},
      {"bert-base-uncased", 9},
  };
  auto it = kLayers.find(model_id);
  if (it == kLayers.end()) return std::nullopt;
  return it->second;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BackendError("cannot open model config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw BackendError("model config " + path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  ModelConfig cfg;
  try {
    cfg.model_id = j.at("model_id").get<std::string>();
    cfg.encoder_path = resolve(j.at("encoder_path").get<std::string>());
    cfg.tokenizer_path = resolve(j.at("tokenizer_path").get<std::string>());
    if (j.contains("layer") && !j["layer"].is_null()) cfg.layer = j["layer"].get<int>();
    cfg.max_length = j.value("max_length", 512);
    if (j.contains("nli_label_order") && !j["nli_label_order"].is_null()) {
      const auto names = j["nli_label_order"].get<std::vector<std::string>>();
      if (names.size() != 3) throw BackendError("nli_label_order must list three labels");
      std::array<NliLabel, 3> order{};
      std::set<NliLabel> seen;
      for (std::size_t i = 0; i < 3; ++i) {
        order[i] = parse_nli_label(names[i]);
        seen.insert(order[i]);
      }
      if (seen.size() != 3) throw BackendError("nli_label_order must be a permutation");
      cfg.nli_label_order = order;
    }
    const auto mode = j.value("long_input_mode", std::string("truncate"));
    if (mode == "truncate") {
      cfg.long_input_mode = LongInputMode::truncate;
    } else if (mode == "window") {
      cfg.long_input_mode = LongInputMode::window;
    } else {
      throw BackendError("unknown long_input_mode '" + mode + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw BackendError("model config " + path.string() + ": " + e.what());
  }
  if (cfg.max_length < 8) throw BackendError("max_length must be at least 8");
  return cfg;
}

double IdfTable::weight(const std::string& token) const {
  auto it = weights.find(token);
  return it == weights.end() ? default_weight : it->second;
}

std::vector<double> IdfTable::weights_for(std::span<const std::string> tokens) const {
  std::vector<double> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(weight(t));
  return out;
}

IdfTable compute_idf(std::span<const std::vector<std::string>> tokenized_docs) {
  if (tokenized_docs.empty()) throw Error("cannot compute IDF over an empty corpus");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : tokenized_docs) {
    std::set<std::string> uniq(doc.begin(), doc.end());
    for (const auto& t : uniq) ++df[t];
  }
  IdfTable table;
  table.doc_count = tokenized_docs.size();
  const double m1 = static_cast<double>(table.doc_count) + 1.0;
  table.default_weight = std::log(m1);
  for (const auto& [tok, count] : df) {
    table.weights.emplace(tok, std::log(m1 / (static_cast<double>(count) + 1.0)));
  }
  return table;
}

}  // namespace docasref
