#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "docasref/types.hpp"

namespace docasref {

struct NgramMultiset {
  std::size_t n = 1;
  /// Keys concatenate each token as `<byte length>:<token>`.
  std::unordered_map<std::string, std::size_t> counts;
  std::size_t total = 0;
};

NgramMultiset ngrams(const std::vector<std::string>& tokens, std::size_t n);

ScoreTriple rouge_n(const std::vector<std::string>& cand, const std::vector<std::string>& ref, std::size_t n);

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);
ScoreTriple rouge_l(const std::vector<std::string>& cand, const std::vector<std::string>& ref);

enum class RougeVariant { r1, r2, rl };

RougeVariant parse_rouge_variant(const std::string& name);
const char* to_string(RougeVariant variant);

/// ROUGE with the document in the reference slot.
ScoreTriple rouge_reffree(std::string_view summary, std::string_view document, RougeVariant variant);

}  // namespace docasref
