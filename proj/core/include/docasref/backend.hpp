#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docasref/embedding.hpp"

namespace docasref {

/// Source of token embeddings, sentence embeddings and NLI probabilities.
///
/// A backend instance is a single-consumer session: callers must not issue
/// concurrent requests against one instance. Parallel scoring creates one
/// backend per worker through a BackendFactory.
class Backend {
 public:
  virtual ~Backend() = default;

  /// Contextual vectors of the content subwords (special tokens removed),
  /// rows L2-normalized.
  virtual EmbeddingSequence embed_tokens(std::string_view text) = 0;

  /// Mean of the rows returned by embed_tokens, L2-normalized.
  virtual std::vector<double> embed_sentence(std::string_view text);

  /// Probabilities with `premise` as the first segment.
  virtual NliDistribution nli_probs(std::string_view premise, std::string_view hypothesis);

  /// Content subword tokens, as used for IDF statistics.
  virtual std::vector<std::string> tokenize(std::string_view text);

  virtual std::string model_id() const = 0;

  /// Distinguishes configurations that produce different embeddings for the
  /// same model id (layer, long-input mode). Used as an embedding cache key.
  virtual std::string cache_key() const { return model_id(); }
};

/// Creates an independent backend session for a named model.
using BackendFactory = std::function<std::unique_ptr<Backend>(const std::string& model_name)>;

/// Cosine of two vectors (dot product divided by both norms).
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace docasref
