#include "docasref/token_metrics.hpp"

#include <algorithm>
#include <limits>

namespace docasref {
namespace {

// Plain sequential dot products: the value of sim(i, j) does not depend on
// which sequence is on which side.
Matrix similarity(const Matrix& a, const Matrix& b) {
  Matrix sim(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto x = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto y = b.row(j);
      double dot = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) dot += x[k] * y[k];
      sim(i, j) = dot;
    }
  }
  return sim;
}

std::vector<double> row_max(const Matrix& sim) {
  std::vector<double> best(sim.rows(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < sim.rows(); ++i) {
    for (std::size_t j = 0; j < sim.cols(); ++j) best[i] = std::max(best[i], sim(i, j));
  }
  return best;
}

std::vector<double> col_max(const Matrix& sim) {
  std::vector<double> best(sim.cols(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < sim.rows(); ++i) {
    for (std::size_t j = 0; j < sim.cols(); ++j) best[j] = std::max(best[j], sim(i, j));
  }
  return best;
}

double weighted_mean(const std::vector<double>& best, const std::vector<double>* w) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < best.size(); ++i) {
    const double wi = w ? (*w)[i] : 1.0;
    num += wi * best[i];
    den += wi;
  }
  return den > 0.0 ? num / den : 0.0;
}

void attach_idf(EmbeddingSequence& seq, const IdfTable& idf) { seq.idf = idf.weights_for(seq.tokens); }

}  // namespace

ScoreTriple greedy_match_scores(const EmbeddingSequence& cand, const EmbeddingSequence& ref, bool use_idf) {
  if (cand.size() == 0 || ref.size() == 0) throw Error("greedy matching needs non-empty sequences");
  if (cand.dim() != ref.dim()) {
    throw Error("embedding dimensions differ (" + std::to_string(cand.dim()) + " vs " + std::to_string(ref.dim()) + ")");
  }
  if (use_idf && (!cand.idf || !ref.idf)) throw Error("use_idf requires idf weights on both sequences");

  const Matrix sim = similarity(cand.vectors, ref.vectors);
  const double p = weighted_mean(row_max(sim), use_idf ? &*cand.idf : nullptr);
  const double r = weighted_mean(col_max(sim), use_idf ? &*ref.idf : nullptr);
  return ScoreTriple::from_pr(p, r);
}

ScoreTriple bertscore_reffree(std::string_view summary, std::string_view document, const GreedyMatchConfig& cfg,
                              Backend& backend, const IdfTable* idf) {
  auto sum_seq = backend.embed_tokens(summary);
  auto doc_seq = backend.embed_tokens(document);
  if (cfg.use_idf) {
    if (idf) {
      attach_idf(sum_seq, *idf);
      attach_idf(doc_seq, *idf);
    } else if (!sum_seq.idf || !doc_seq.idf) {
      throw Error("use_idf is set but no IDF table or per-token weights are available");
    }
  }
  return greedy_match_scores(sum_seq, doc_seq, cfg.use_idf);
}

double moverscore_greedy(std::string_view summary, std::string_view document, const GreedyMatchConfig& cfg,
                         Backend& backend) {
  const auto sum_seq = backend.embed_tokens(summary);
  const auto doc_seq = backend.embed_tokens(document);
  if (sum_seq.size() == 0 || doc_seq.size() == 0) throw Error("moverscore needs non-empty sequences");
  if (sum_seq.dim() != doc_seq.dim()) throw Error("embedding dimensions differ");
  const Matrix sim = similarity(sum_seq.vectors, doc_seq.vectors);
  double total = 0.0;
  for (double best : col_max(sim)) total += best;
  return total / static_cast<double>(doc_seq.size());
}

}  // namespace docasref
