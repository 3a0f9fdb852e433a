#include "docasref/backend.hpp"

#include <cmath>

namespace docasref {

std::vector<double> Backend::embed_sentence(std::string_view text) {
  const auto seq = embed_tokens(text);
  if (seq.size() == 0) throw BackendError("cannot embed an empty sentence");
  std::vector<double> mean(seq.dim(), 0.0);
  for (std::size_t r = 0; r < seq.size(); ++r) {
    const auto row = seq.vectors.row(r);
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += row[c];
  }
  const double n = static_cast<double>(seq.size());
  double sq = 0.0;
  for (double& v : mean) {
    v /= n;
    sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0)) throw BackendError("sentence embedding has zero norm");
  for (double& v : mean) v /= norm;
  return mean;
}

NliDistribution Backend::nli_probs(std::string_view, std::string_view) {
  throw BackendError("backend '" + model_id() + "' does not provide NLI probabilities");
}

std::vector<std::string> Backend::tokenize(std::string_view text) { return embed_tokens(text).tokens; }

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("cosine of vectors with different dimensions");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw Error("cosine of a zero vector");
  return dot / std::sqrt(na * nb);
}

}  // namespace docasref
