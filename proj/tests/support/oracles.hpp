#pragma once

// Brute-force reference implementations used to cross-check the engine.
// They share no code with the library and favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "docasref/embedding.hpp"

namespace oracle {

struct Triple {
  double p = 0.0;
  double r = 0.0;
  double f = 0.0;
};

inline double f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

// Every pairwise dot product, then max over the other side, then a
// weighted mean.
inline Triple greedy(const docasref::EmbeddingSequence& cand, const docasref::EmbeddingSequence& ref,
                     bool use_idf) {
  const std::size_t n = cand.size();
  const std::size_t m = ref.size();
  std::vector<std::vector<double>> sim(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < cand.dim(); ++d) s += cand.vectors(i, d) * ref.vectors(j, d);
      sim[i][j] = s;
    }
  }
  auto weight = [&](const docasref::EmbeddingSequence& s, std::size_t k) {
    return use_idf ? (*s.idf)[k] : 1.0;
  };
  double pn = 0.0, pd = 0.0, rn = 0.0, rd = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = -INFINITY;
    for (std::size_t j = 0; j < m; ++j) best = std::max(best, sim[i][j]);
    pn += weight(cand, i) * best;
    pd += weight(cand, i);
  }
  for (std::size_t j = 0; j < m; ++j) {
    double best = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, sim[i][j]);
    rn += weight(ref, j) * best;
    rd += weight(ref, j);
  }
  Triple t;
  t.p = pd > 0.0 ? pn / pd : 0.0;
  t.r = rd > 0.0 ? rn / rd : 0.0;
  t.f = f1(t.p, t.r);
  return t;
}

using Tokens = std::vector<std::string>;

inline std::map<Tokens, int> count_ngrams(const Tokens& t, std::size_t n) {
  std::map<Tokens, int> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++out[Tokens(t.begin() + i, t.begin() + i + n)];
  return out;
}

// Clipped n-gram overlap divided by the n-gram totals of each side.
inline Triple rouge_n(const Tokens& cand, const Tokens& ref, std::size_t n) {
  const auto c = count_ngrams(cand, n);
  const auto r = count_ngrams(ref, n);
  int ct = 0, rt = 0, overlap = 0;
  for (const auto& [g, k] : c) ct += k;
  for (const auto& [g, k] : r) rt += k;
  if (ct == 0 || rt == 0) return {};
  for (const auto& [g, k] : c) {
    auto it = r.find(g);
    if (it != r.end()) overlap += std::min(k, it->second);
  }
  Triple t;
  t.p = static_cast<double>(overlap) / ct;
  t.r = static_cast<double>(overlap) / rt;
  t.f = f1(t.p, t.r);
  return t;
}

inline bool is_subsequence(const Tokens& needle, const Tokens& hay) {
  std::size_t k = 0;
  for (const auto& h : hay) {
    if (k < needle.size() && needle[k] == h) ++k;
  }
  return k == needle.size();
}

// Tries every subsequence of `a` (so a must stay short) and keeps the
// longest one that also occurs in `b`.
inline std::size_t lcs_exhaustive(const Tokens& a, const Tokens& b) {
  std::size_t best = 0;
  const std::uint32_t subsets = 1u << a.size();
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    const auto len = static_cast<std::size_t>(__builtin_popcount(mask));
    if (len <= best) continue;
    Tokens sub;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (mask & (1u << i)) sub.push_back(a[i]);
    }
    if (is_subsequence(sub, b)) best = len;
  }
  return best;
}

inline Triple rouge_l(const Tokens& cand, const Tokens& ref) {
  if (cand.empty() || ref.empty()) return {};
  const double l = static_cast<double>(lcs_exhaustive(cand, ref));
  Triple t;
  t.p = l / static_cast<double>(cand.size());
  t.r = l / static_cast<double>(ref.size());
  t.f = f1(t.p, t.r);
  return t;
}

// O(n^2) rank: 1 + (# strictly smaller) + (# equal others) / 2.
inline std::vector<double> naive_ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0.0, equal = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] < x[i]) less += 1.0;
      if (j != i && x[j] == x[i]) equal += 1.0;
    }
    r[i] = 1.0 + less + equal / 2.0;
  }
  return r;
}

// Two-pass textbook formula; NaN when either side has zero variance.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return NAN;
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(naive_ranks(x), naive_ranks(y));
}

inline docasref::EmbeddingSequence random_unit_sequence(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                                                        bool with_idf = false) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  docasref::EmbeddingSequence s;
  s.vectors = docasref::Matrix(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        s.vectors(i, d) = g(rng);
        norm += s.vectors(i, d) * s.vectors(i, d);
      }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    for (std::size_t d = 0; d < dim; ++d) s.vectors(i, d) /= norm;
    s.tokens.push_back("t" + std::to_string(i));
  }
  if (with_idf) {
    std::vector<double> w(n);
    for (auto& v : w) v = u(rng);
    s.idf = w;
  }
  return s;
}

inline Tokens random_tokens(std::mt19937_64& rng, std::size_t max_len, int alphabet) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  Tokens t(len(rng));
  for (auto& s : t) s = std::string(1, static_cast<char>('a' + sym(rng)));
  return t;
}

}  // namespace oracle
