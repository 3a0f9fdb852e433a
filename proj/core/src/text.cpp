#include "docasref/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace docasref {
namespace {

constexpr std::array<std::string_view, 19> kAbbreviations = {
    "dr.", "mr.", "mrs.", "ms.", "prof.", "st.", "mt.", "jr.", "sr.", "gen.",
    "gov.", "sen.", "capt.", "no.", "vs.", "u.s.", "e.g.", "i.e.", "etc.",
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(char c) { return is_terminal(c) || c == '"' || c == '\'' || c == ')'; }

bool opens_sentence(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isupper(u) || std::isdigit(u) || c == '"' || c == '\'';
}

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool ends_with_abbreviation(std::string_view sentence_so_far) {
  const auto last_space = sentence_so_far.find_last_of(" \t\r\n\f\v");
  const auto word = last_space == std::string_view::npos ? sentence_so_far
                                                         : sentence_so_far.substr(last_space + 1);
  const auto lowered = lower_ascii(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lowered) != kAbbreviations.end();
}

}  // namespace

std::string_view trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return text.substr(b, e - b);
}

std::vector<std::string> split_sentences(std::string_view input) {
  const std::string_view text = trim(input);
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && is_closer(text[j])) ++j;
    if (j < text.size() && is_space(text[j])) {
      std::size_t k = j;
      while (k < text.size() && is_space(text[k])) ++k;
      if (k < text.size() && opens_sentence(text[k]) &&
          !ends_with_abbreviation(text.substr(start, j - start))) {
        out.emplace_back(text.substr(start, j - start));
        start = k;
        i = k;
        continue;
      }
    }
    i = j;
  }
  const auto tail = trim(text.substr(start));
  if (!tail.empty()) out.emplace_back(tail);
  return out;
}

std::vector<std::string> word_tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string join_sentences(std::span<const std::string> sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s;
  }
  return out;
}

}  // namespace docasref
