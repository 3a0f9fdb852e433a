#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "docasref/types.hpp"

namespace docasref {

struct Encoding {
  std::vector<std::string> tokens;
  std::vector<std::int64_t> ids;
  std::vector<std::int64_t> type_ids;
  std::vector<bool> special;

  std::size_t size() const { return ids.size(); }
  void append(const std::string& token, std::int64_t id, std::int64_t type_id, bool is_special);
  /// First `n` entries.
  Encoding head(std::size_t n) const;
  Encoding slice(std::size_t begin, std::size_t end) const;
};

/// Tokenizer driven by a Hugging Face `tokenizer.json` definition.
///
/// Supported pieces: WordPiece and BPE models; BertNormalizer, Lowercase,
/// Strip and Sequence normalizers (NFx normalizers are accepted as no-ops);
/// BertPreTokenizer, Whitespace, WhitespaceSplit, ByteLevel and Sequence
/// pre-tokenizers; TemplateProcessing, BertProcessing and RobertaProcessing
/// post-processors. Non-ASCII text is handled byte-exactly for ByteLevel BPE;
/// for BERT normalization only Latin-1 letters are case-folded and stripped
/// of accents.
class SubwordTokenizer {
 public:
  static SubwordTokenizer from_file(const std::filesystem::path& path);
  static SubwordTokenizer from_json(std::string_view json_text);

  SubwordTokenizer(SubwordTokenizer&&) noexcept;
  SubwordTokenizer& operator=(SubwordTokenizer&&) noexcept;
  ~SubwordTokenizer();

  /// Content tokens only (no special tokens).
  Encoding tokenize(std::string_view text) const;

  /// Wraps one or two content encodings with the post-processor's special
  /// tokens and segment ids.
  Encoding add_special_tokens(const Encoding& first, const Encoding* second = nullptr) const;

  /// Number of special tokens the post-processor adds for one or two segments.
  std::size_t num_special_tokens(bool pair) const;

  std::optional<std::int64_t> token_to_id(const std::string& token) const;

  /// One past the largest token id.
  std::size_t vocab_size() const;

 private:
  struct Impl;
  explicit SubwordTokenizer(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

namespace utf8 {

/// Decodes UTF-8; invalid bytes decode to U+FFFD.
std::vector<char32_t> decode(std::string_view s);
void append(std::string& out, char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

}  // namespace utf8

}  // namespace docasref
