#include "docasref/sentence_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "docasref/text.hpp"

namespace docasref {

SentenceSimKind parse_sim_kind(const std::string& name) {
  if (name == "cosine") return SentenceSimKind::cosine;
  if (name == "nli_1mN" || name == "1-N") return SentenceSimKind::nli_1mN;
  if (name == "nli_EmC" || name == "E-C") return SentenceSimKind::nli_EmC;
  if (name == "nli_E" || name == "E") return SentenceSimKind::nli_E;
  throw Error("unknown sentence similarity '" + name + "' (expected cosine, nli_1mN, nli_EmC or nli_E)");
}

const char* to_string(SentenceSimKind kind) {
  switch (kind) {
    case SentenceSimKind::cosine: return "cosine";
    case SentenceSimKind::nli_1mN: return "nli_1mN";
    case SentenceSimKind::nli_EmC: return "nli_EmC";
    case SentenceSimKind::nli_E: return "nli_E";
  }
  return "?";
}

SentenceWeighting parse_weighting(const std::string& name) {
  if (name == "none") return SentenceWeighting::none;
  if (name == "sum") return SentenceWeighting::sum;
  if (name == "entropy") return SentenceWeighting::entropy;
  throw Error("unknown sentence weighting '" + name + "' (expected none, sum or entropy)");
}

const char* to_string(SentenceWeighting weighting) {
  switch (weighting) {
    case SentenceWeighting::none: return "none";
    case SentenceWeighting::sum: return "sum";
    case SentenceWeighting::entropy: return "entropy";
  }
  return "?";
}

double nli_similarity(const NliDistribution& d, SentenceSimKind kind) {
  switch (kind) {
    case SentenceSimKind::nli_1mN: return 1.0 - d.neutral;
    case SentenceSimKind::nli_EmC: return d.entail - d.contradict;
    case SentenceSimKind::nli_E: return d.entail;
    case SentenceSimKind::cosine: break;
  }
  throw Error("cosine is not an NLI similarity");
}

namespace {

// Memoizes sentence embeddings within one scoring call.
class SentenceSim {
 public:
  SentenceSim(const SentenceSimConfig& cfg, Backend& backend) : cfg_(cfg), backend_(backend) {}

  double operator()(const std::string& a, const std::string& b) {
    if (cfg_.sim_kind == SentenceSimKind::cosine) return cosine(vec(a), vec(b));
    return nli_similarity(backend_.nli_probs(a, b), cfg_.sim_kind);
  }

  Matrix matrix(std::span<const std::string> left, std::span<const std::string> right, bool skip_diagonal) {
    Matrix m(left.size(), right.size());
    for (std::size_t i = 0; i < left.size(); ++i) {
      for (std::size_t j = 0; j < right.size(); ++j) {
        if (skip_diagonal && i == j) continue;
        m(i, j) = (*this)(left[i], right[j]);
      }
    }
    return m;
  }

 private:
  const std::vector<double>& vec(const std::string& s) {
    auto it = cache_.find(s);
    if (it == cache_.end()) it = cache_.emplace(s, backend_.embed_sentence(s)).first;
    return it->second;
  }

  const SentenceSimConfig& cfg_;
  Backend& backend_;
  std::map<std::string, std::vector<double>> cache_;
};

std::vector<double> normalized_or_uniform(const std::vector<double>& w) {
  double total = 0.0;
  for (double x : w) total += x;
  std::vector<double> out(w.size());
  if (std::abs(total) > 1e-12) {
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] / total;
  } else {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(w.size()));
  }
  return out;
}

}  // namespace

Matrix sent_sim_matrix(std::span<const std::string> left, std::span<const std::string> right,
                       const SentenceSimConfig& cfg, Backend& backend) {
  if (left.empty() || right.empty()) throw Error("sentence similarity needs non-empty sentence lists");
  SentenceSim sim(cfg, backend);
  return sim.matrix(left, right, false);
}

std::vector<double> doc_sentence_weights(const Matrix& self_sim, SentenceWeighting g) {
  const std::size_t k = self_sim.rows();
  if (k == 0 || self_sim.cols() != k) throw Error("document self-similarity must be a non-empty square matrix");
  if (k == 1) return {1.0};
  std::vector<double> w(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (g == SentenceWeighting::entropy) {
      double total = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        if (j != i) total += self_sim(i, j) + 1.0;
      }
      double h = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        if (j == i) continue;
        const double q = total > 0.0 ? (self_sim(i, j) + 1.0) / total : 1.0 / static_cast<double>(k - 1);
        if (q > 0.0) h -= q * std::log(q);
      }
      w[i] = h;
    } else {
      for (std::size_t j = 0; j < k; ++j) {
        if (j != i) w[i] += self_sim(i, j);
      }
    }
  }
  return w;
}

std::vector<double> summary_sentence_votes(std::span<const double> w, const Matrix& cross_sim) {
  if (w.size() != cross_sim.rows()) {
    throw Error("vote weights (" + std::to_string(w.size()) + ") do not match document sentences (" +
                std::to_string(cross_sim.rows()) + ")");
  }
  std::vector<double> v(cross_sim.cols(), 0.0);
  for (std::size_t i = 0; i < cross_sim.rows(); ++i) {
    for (std::size_t j = 0; j < cross_sim.cols(); ++j) v[j] += w[i] * cross_sim(i, j);
  }
  return v;
}

ScoreTriple pool_sentence_scores(const Matrix& cross_sim, const Matrix* self_sim, SentenceWeighting g,
                                 SentenceWeights* weights_out) {
  const std::size_t kd = cross_sim.rows();
  const std::size_t ks = cross_sim.cols();
  if (kd == 0 || ks == 0) throw Error("sentence scoring needs at least one sentence on each side");
  std::vector<double> best_for_sum(ks, -std::numeric_limits<double>::infinity());
  std::vector<double> best_for_doc(kd, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < kd; ++i) {
    for (std::size_t j = 0; j < ks; ++j) {
      best_for_sum[j] = std::max(best_for_sum[j], cross_sim(i, j));
      best_for_doc[i] = std::max(best_for_doc[i], cross_sim(i, j));
    }
  }
  std::vector<double> wn(kd, 1.0 / static_cast<double>(kd));
  std::vector<double> vn(ks, 1.0 / static_cast<double>(ks));
  if (g != SentenceWeighting::none) {
    if (!self_sim || self_sim->rows() != kd) throw Error("weighted sentence scoring needs the document self-similarity");
    const auto w = doc_sentence_weights(*self_sim, g);
    const auto v = summary_sentence_votes(w, cross_sim);
    wn = normalized_or_uniform(w);
    vn = normalized_or_uniform(v);
    if (weights_out) *weights_out = {w, v};
  }
  double p = 0.0;
  double r = 0.0;
  if (g == SentenceWeighting::none) {
    for (double b : best_for_sum) p += b;
    for (double b : best_for_doc) r += b;
    p /= static_cast<double>(ks);
    r /= static_cast<double>(kd);
  } else {
    for (std::size_t j = 0; j < ks; ++j) p += vn[j] * best_for_sum[j];
    for (std::size_t i = 0; i < kd; ++i) r += wn[i] * best_for_doc[i];
  }
  return ScoreTriple::from_pr(p, r);
}

ScoreTriple sentence_bertscore(std::string_view summary, std::string_view document, const SentenceSimConfig& cfg,
                               Backend& backend) {
  const auto doc_sents = split_sentences(document);
  const auto sum_sents = split_sentences(summary);
  if (doc_sents.empty()) throw Error("document has no sentences");
  if (sum_sents.empty()) throw Error("summary has no sentences");
  SentenceSim sim(cfg, backend);
  const Matrix cross = sim.matrix(doc_sents, sum_sents, false);
  if (cfg.weighting == SentenceWeighting::none) return pool_sentence_scores(cross, nullptr, cfg.weighting);
  const Matrix self = sim.matrix(doc_sents, doc_sents, true);
  return pool_sentence_scores(cross, &self, cfg.weighting);
}

Document leadword_filter(const Document& document, double k) {
  if (!(k > 0.0 && k <= 1.0)) throw Error("leadword ratio must lie in (0, 1], got " + std::to_string(k));
  const auto sents = split_sentences(document.text);
  if (sents.empty()) throw Error("document '" + document.id + "' has no sentences");
  auto keep = static_cast<std::size_t>(std::ceil(k * static_cast<double>(sents.size()) - 1e-9));
  keep = std::clamp<std::size_t>(keep, 1, sents.size());
  Document out = document;
  out.text = join_sentences(std::span<const std::string>(sents.data(), keep));
  return out;
}

double multi_doc_score(std::span<const Document> docs, std::string_view summary, const PairwiseMetric& metric,
                       Component component) {
  if (docs.empty()) throw Error("multi-document scoring needs at least one document");
  double total = 0.0;
  for (const auto& d : docs) {
    try {
      total += metric(summary, d).component(component);
    } catch (const Error& e) {
      throw Error("document '" + d.id + "': " + e.what());
    }
  }
  return total;
}

}  // namespace docasref
