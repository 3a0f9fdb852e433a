#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docasref/backend.hpp"

namespace docasref {

enum class SentenceSimKind { cosine, nli_1mN, nli_EmC, nli_E };
enum class SentenceWeighting { none, sum, entropy };

SentenceSimKind parse_sim_kind(const std::string& name);
const char* to_string(SentenceSimKind kind);
SentenceWeighting parse_weighting(const std::string& name);
const char* to_string(SentenceWeighting weighting);

struct SentenceSimConfig {
  SentenceSimKind sim_kind = SentenceSimKind::cosine;
  SentenceWeighting weighting = SentenceWeighting::none;
  ModelConfig model;
};

struct SentenceWeights {
  std::vector<double> doc_weights;    // w, one per document sentence
  std::vector<double> summary_votes;  // v, one per summary sentence
};

/// 1 - N, E - C or E.
double nli_similarity(const NliDistribution& d, SentenceSimKind kind);

/// (i, j) = sim(left_i, right_j). For NLI kinds left_i is the premise.
Matrix sent_sim_matrix(std::span<const std::string> left, std::span<const std::string> right,
                       const SentenceSimConfig& cfg, Backend& backend);

/// Importance of each document sentence from its similarity to the others.
/// sum: off-diagonal row sum. entropy: entropy of the off-diagonal row
/// shifted by +1 and normalized. A single sentence gets weight 1.
std::vector<double> doc_sentence_weights(const Matrix& self_sim, SentenceWeighting g);

/// v_j = sum_i w_i * cross_sim(i, j).
std::vector<double> summary_sentence_votes(std::span<const double> w, const Matrix& cross_sim);

/// Pools a (doc sentences x summary sentences) similarity matrix. `self_sim`
/// is only read for sum/entropy weighting. Weights are normalized to sum to
/// one; when they sum to zero, uniform weights are used instead.
ScoreTriple pool_sentence_scores(const Matrix& cross_sim, const Matrix* self_sim, SentenceWeighting g,
                                 SentenceWeights* weights_out = nullptr);

ScoreTriple sentence_bertscore(std::string_view summary, std::string_view document, const SentenceSimConfig& cfg,
                               Backend& backend);

/// Keeps the first ceil(k * sentence_count) sentences. k must lie in (0, 1].
Document leadword_filter(const Document& document, double k);

using PairwiseMetric = std::function<MetricValue(std::string_view summary, const Document& document)>;

/// Sum over documents of the chosen component of metric(summary, doc).
double multi_doc_score(std::span<const Document> docs, std::string_view summary, const PairwiseMetric& metric,
                       Component component);

}  // namespace docasref
