#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace docasref {

/// Rule-based sentence splitter. A boundary is a run of `.`, `!` or `?`
/// (optionally followed by closing quotes/brackets) followed by whitespace and
/// an uppercase letter, digit or opening quote, unless the word ending at the
/// boundary is a known abbreviation (Dr., Mr., U.S., e.g., ...).
std::vector<std::string> split_sentences(std::string_view text);

/// Lowercased alphanumeric runs. Bytes >= 0x80 count as alphanumeric so
/// UTF-8 words stay whole; only ASCII letters are case-folded.
std::vector<std::string> word_tokenize(std::string_view text);

/// Joins sentences with single spaces.
std::string join_sentences(std::span<const std::string> sentences);

std::string_view trim(std::string_view text);

}  // namespace docasref
