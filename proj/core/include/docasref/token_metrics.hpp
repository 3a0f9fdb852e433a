#pragma once

#include <string_view>

#include "docasref/backend.hpp"

namespace docasref {

struct GreedyMatchConfig {
  bool use_idf = false;
  ModelConfig model;
};

/// Greedy max-similarity matching between two unit-row sequences.
/// Precision pools over candidate rows, recall over reference rows; with
/// use_idf each row is weighted by its idf entry.
ScoreTriple greedy_match_scores(const EmbeddingSequence& cand, const EmbeddingSequence& ref, bool use_idf);

/// BERTScore with the document in the reference slot. When `idf` is given
/// and cfg.use_idf is set, both sides are weighted from that table.
ScoreTriple bertscore_reffree(std::string_view summary, std::string_view document, const GreedyMatchConfig& cfg,
                              Backend& backend, const IdfTable* idf = nullptr);

/// Mean over document tokens of the best similarity to any summary token.
double moverscore_greedy(std::string_view summary, std::string_view document, const GreedyMatchConfig& cfg,
                         Backend& backend);

}  // namespace docasref
