#include "docasref/lexical_metrics.hpp"

#include <algorithm>

#include "docasref/text.hpp"

namespace docasref {

NgramMultiset ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  if (n == 0) throw Error("n-gram order must be positive");
  NgramMultiset out;
  out.n = n;
  if (tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) {
      key += std::to_string(tokens[i + k].size());
      key.push_back(':');
      key += tokens[i + k];
    }
    ++out.counts[key];
    ++out.total;
  }
  return out;
}

ScoreTriple rouge_n(const std::vector<std::string>& cand, const std::vector<std::string>& ref, std::size_t n) {
  const auto c = ngrams(cand, n);
  const auto r = ngrams(ref, n);
  if (c.total == 0 || r.total == 0) return {};
  std::size_t overlap = 0;
  for (const auto& [key, count] : c.counts) {
    auto it = r.counts.find(key);
    if (it != r.counts.end()) overlap += std::min(count, it->second);
  }
  const double o = static_cast<double>(overlap);
  return ScoreTriple::from_pr(o / static_cast<double>(c.total), o / static_cast<double>(r.total));
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

ScoreTriple rouge_l(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  const double l = static_cast<double>(lcs_length(cand, ref));
  const double p = cand.empty() ? 0.0 : l / static_cast<double>(cand.size());
  const double r = ref.empty() ? 0.0 : l / static_cast<double>(ref.size());
  return ScoreTriple::from_pr(p, r);
}

RougeVariant parse_rouge_variant(const std::string& name) {
  if (name == "r1" || name == "rouge-1" || name == "rouge1") return RougeVariant::r1;
  if (name == "r2" || name == "rouge-2" || name == "rouge2") return RougeVariant::r2;
  if (name == "rl" || name == "rouge-l" || name == "rougeL") return RougeVariant::rl;
  throw Error("unknown ROUGE variant '" + name + "'");
}

const char* to_string(RougeVariant variant) {
  switch (variant) {
    case RougeVariant::r1: return "rouge-1";
    case RougeVariant::r2: return "rouge-2";
    case RougeVariant::rl: return "rouge-l";
  }
  return "?";
}

ScoreTriple rouge_reffree(std::string_view summary, std::string_view document, RougeVariant variant) {
  const auto cand = word_tokenize(summary);
  const auto ref = word_tokenize(document);
  switch (variant) {
    case RougeVariant::r1: return rouge_n(cand, ref, 1);
    case RougeVariant::r2: return rouge_n(cand, ref, 2);
    case RougeVariant::rl: return rouge_l(cand, ref);
  }
  return {};
}

}  // namespace docasref
