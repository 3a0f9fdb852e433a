#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "docasref/types.hpp"

namespace docasref {

class BackendError : public Error {
 public:
  using Error::Error;
};

/// Subword tokens with one contextual vector per token.
struct EmbeddingSequence {
  std::vector<std::string> tokens;
  Matrix vectors;  // n_tokens x dim
  std::optional<std::vector<double>> idf;
  std::string model_id;
  int layer = 0;

  std::size_t size() const { return tokens.size(); }
  std::size_t dim() const { return vectors.cols(); }

  /// Throws BackendError when row/token/idf counts disagree or a value is
  /// not finite. With `require_unit_rows`, also checks every row norm is 1
  /// within 1e-6.
  void validate(bool require_unit_rows = true) const;
};

/// Scales every row to unit L2 norm. Throws BackendError on a zero row.
void normalize_rows(Matrix& m);

enum class NliLabel { entail, neutral, contradict };

NliLabel parse_nli_label(const std::string& name);
const char* to_string(NliLabel label);

struct NliDistribution {
  double entail = 0.0;
  double neutral = 0.0;
  double contradict = 0.0;

  /// Softmax over three logits listed in `order`, remapped to canonical
  /// (entail, neutral, contradict).
  static NliDistribution from_logits(std::span<const double> logits,
                                     const std::array<NliLabel, 3>& order);
};

enum class LongInputMode { truncate, window };

struct ModelConfig {
  std::string model_id;
  std::filesystem::path encoder_path;
  std::filesystem::path tokenizer_path;
  std::optional<int> layer;  // unset: per-model default, else the last layer
  int max_length = 512;
  std::optional<std::array<NliLabel, 3>> nli_label_order;
  LongInputMode long_input_mode = LongInputMode::truncate;
};

/// Layer used by the stock BERTScore tooling for well-known checkpoints
/// (e.g. 17 for roberta-large). Empty for unknown ids.
std::optional<int> default_layer(const std::string& model_id);

/// Reads a model config JSON file. Relative paths inside it resolve against
/// the file's directory.
ModelConfig load_model_config(const std::filesystem::path& path);

struct IdfTable {
  std::size_t doc_count = 0;
  std::unordered_map<std::string, double> weights;
  double default_weight = 0.0;

  double weight(const std::string& token) const;
  std::vector<double> weights_for(std::span<const std::string> tokens) const;
};

/// weights[t] = log((M+1)/(df(t)+1)); default_weight = log(M+1).
IdfTable compute_idf(std::span<const std::vector<std::string>> tokenized_docs);

}  // namespace docasref
