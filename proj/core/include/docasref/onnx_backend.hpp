#pragma once

#include <memory>
#include <string>
#include <vector>

#include "docasref/backend.hpp"
#include "docasref/tokenizer.hpp"

namespace docasref {

/// An encoder or NLI classifier exported to ONNX together with its
/// tokenizer. Immutable once loaded and safe to share between sessions.
///
/// Encoder graphs expose `hidden_states_0` .. `hidden_states_N` (0 is the
/// embedding output); classifier graphs expose `logits` of shape [1, 3].
class OnnxModel {
 public:
  static std::shared_ptr<const OnnxModel> load(const ModelConfig& config);
  ~OnnxModel();

  const ModelConfig& config() const;
  const std::string& model_id() const;
  const SubwordTokenizer& tokenizer() const;

  bool is_encoder() const;
  bool is_classifier() const;
  /// Number of transformer layers (encoder graphs only).
  int num_layers() const;
  /// Layer whose hidden states embed_tokens returns.
  int layer() const;

  /// Hidden states of one encoded input at the configured layer, one row
  /// per position (special tokens included).
  Matrix encode(const Encoding& input) const;
  /// Raw classifier logits for one encoded pair.
  std::vector<double> classify(const Encoding& input) const;

 private:
  struct Impl;
  explicit OnnxModel(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

/// Backend session over an OnnxModel. embed_tokens drops special tokens and
/// L2-normalizes each row. Inputs longer than the model window are either
/// truncated or, in window mode, split into overlapping windows.
class OnnxBackend final : public Backend {
 public:
  explicit OnnxBackend(const ModelConfig& config);
  explicit OnnxBackend(std::shared_ptr<const OnnxModel> model);

  EmbeddingSequence embed_tokens(std::string_view text) override;
  NliDistribution nli_probs(std::string_view premise, std::string_view hypothesis) override;
  std::vector<std::string> tokenize(std::string_view text) override;
  std::string model_id() const override;
  std::string cache_key() const override;

  const OnnxModel& model() const { return *model_; }

 private:
  std::shared_ptr<const OnnxModel> model_;
};

}  // namespace docasref
