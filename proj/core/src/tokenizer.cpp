#include "docasref/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <fstream>
#include <sstream>

#include "docasref/embedding.hpp"
#include "json.hpp"

namespace docasref {

using nlohmann::json;

// ---------------------------------------------------------------------------
// UTF-8

namespace utf8 {

std::vector<char32_t> decode(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode(const std::vector<char32_t>& cps) {
  std::string out;
  for (char32_t c : cps) append(out, c);
  return out;
}

}  // namespace utf8

// ---------------------------------------------------------------------------
// Encoding

void Encoding::append(const std::string& token, std::int64_t id, std::int64_t type_id, bool is_special) {
  tokens.push_back(token);
  ids.push_back(id);
  type_ids.push_back(type_id);
  special.push_back(is_special);
}

Encoding Encoding::slice(std::size_t begin, std::size_t end) const {
  end = std::min(end, size());
  begin = std::min(begin, end);
  Encoding out;
  out.tokens.assign(tokens.begin() + begin, tokens.begin() + end);
  out.ids.assign(ids.begin() + begin, ids.begin() + end);
  out.type_ids.assign(type_ids.begin() + begin, type_ids.begin() + end);
  out.special.assign(special.begin() + begin, special.begin() + end);
  return out;
}

Encoding Encoding::head(std::size_t n) const { return slice(0, n); }

// ---------------------------------------------------------------------------
// Character classes

namespace {

bool is_whitespace(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == 0x00A0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_control(char32_t c) {
  if (c == '\t' || c == '\n' || c == '\r') return false;
  return c < 0x20 || c == 0x7F || (c >= 0x80 && c < 0xA0);
}

bool is_punctuation(char32_t c) {
  if ((c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) || (c >= 123 && c <= 126)) {
    return true;
  }
  return (c >= 0x00A1 && c <= 0x00BF && c != 0x00AA && c != 0x00B5 && c != 0x00BA) ||
         (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) || (c >= 0x3001 && c <= 0x3003) ||
         (c >= 0x3008 && c <= 0x3011);
}

bool is_cjk(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) || (c >= 0x20000 && c <= 0x2A6DF) ||
         (c >= 0x2A700 && c <= 0x2B73F) || (c >= 0x2B740 && c <= 0x2B81F) || (c >= 0x2B820 && c <= 0x2CEAF) ||
         (c >= 0xF900 && c <= 0xFAFF) || (c >= 0x2F800 && c <= 0x2FA1F);
}

bool is_ascii_alpha(char32_t c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }

// Letters in the regex sense: ASCII letters and any non-ASCII code point that
// is neither whitespace nor punctuation.
bool is_letter(char32_t c) {
  if (c < 0x80) return is_ascii_alpha(c);
  return !is_whitespace(c) && !is_punctuation(c) && !is_control(c);
}

char32_t lower(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  return c;
}

// Base letter of precomposed Latin-1 letters; 0 when there is no accent.
char32_t strip_accent(char32_t c) {
  static constexpr std::array<char, 64> kBase = {
      'A', 'A', 'A', 'A', 'A', 'A', 0, 'C', 'E', 'E', 'E', 'E', 'I', 'I', 'I', 'I',   // C0-CF
      0,   'N', 'O', 'O', 'O', 'O', 'O', 0, 0,   'U', 'U', 'U', 'U', 'Y', 0,   0,     // D0-DF
      'a', 'a', 'a', 'a', 'a', 'a', 0, 'c', 'e', 'e', 'e', 'e', 'i', 'i', 'i', 'i',   // E0-EF
      0,   'n', 'o', 'o', 'o', 'o', 'o', 0, 0,   'u', 'u', 'u', 'u', 'y', 0,   'y'};  // F0-FF
  if (c >= 0xC0 && c <= 0xFF) return static_cast<char32_t>(kBase[c - 0xC0]);
  return 0;
}

bool is_combining_mark(char32_t c) { return c >= 0x0300 && c <= 0x036F; }

// ---------------------------------------------------------------------------
// Normalizers

struct Normalizer {
  virtual ~Normalizer() = default;
  virtual std::vector<char32_t> apply(std::vector<char32_t> text) const = 0;
};

struct BertNormalizer final : Normalizer {
  bool clean_text = true;
  bool chinese_chars = true;
  bool strip_accents = true;
  bool lowercase = true;

  std::vector<char32_t> apply(std::vector<char32_t> text) const override {
    std::vector<char32_t> out;
    out.reserve(text.size());
    for (char32_t c : text) {
      if (clean_text) {
        if (c == 0 || c == 0xFFFD || is_control(c)) continue;
        if (is_whitespace(c)) c = ' ';
      }
      if (chinese_chars && is_cjk(c)) {
        out.push_back(' ');
        out.push_back(c);
        out.push_back(' ');
        continue;
      }
      if (strip_accents) {
        if (is_combining_mark(c)) continue;
        if (char32_t base = strip_accent(c)) c = base;
      }
      if (lowercase) c = lower(c);
      out.push_back(c);
    }
    return out;
  }
};

struct LowercaseNormalizer final : Normalizer {
  std::vector<char32_t> apply(std::vector<char32_t> text) const override {
    for (auto& c : text) c = lower(c);
    return text;
  }
};

struct StripNormalizer final : Normalizer {
  bool left = true;
  bool right = true;
  std::vector<char32_t> apply(std::vector<char32_t> text) const override {
    std::size_t b = 0;
    std::size_t e = text.size();
    if (left) {
      while (b < e && is_whitespace(text[b])) ++b;
    }
    if (right) {
      while (e > b && is_whitespace(text[e - 1])) --e;
    }
    return {text.begin() + b, text.begin() + e};
  }
};

struct IdentityNormalizer final : Normalizer {
  std::vector<char32_t> apply(std::vector<char32_t> text) const override { return text; }
};

struct SequenceNormalizer final : Normalizer {
  std::vector<std::unique_ptr<Normalizer>> steps;
  std::vector<char32_t> apply(std::vector<char32_t> text) const override {
    for (const auto& s : steps) text = s->apply(std::move(text));
    return text;
  }
};

std::unique_ptr<Normalizer> make_normalizer(const json& j) {
  if (j.is_null()) return std::make_unique<IdentityNormalizer>();
  const auto type = j.at("type").get<std::string>();
  if (type == "BertNormalizer") {
    auto n = std::make_unique<BertNormalizer>();
    n->clean_text = j.value("clean_text", true);
    n->chinese_chars = j.value("handle_chinese_chars", true);
    n->lowercase = j.value("lowercase", true);
    const auto& sa = j.contains("strip_accents") ? j["strip_accents"] : json(nullptr);
    n->strip_accents = sa.is_null() ? n->lowercase : sa.get<bool>();
    return n;
  }
  if (type == "Lowercase") return std::make_unique<LowercaseNormalizer>();
  if (type == "Strip") {
    auto n = std::make_unique<StripNormalizer>();
    n->left = j.value("strip_left", true);
    n->right = j.value("strip_right", true);
    return n;
  }
  if (type == "NFC" || type == "NFD" || type == "NFKC" || type == "NFKD") {
    return std::make_unique<IdentityNormalizer>();
  }
  if (type == "StripAccents") {
    auto n = std::make_unique<BertNormalizer>();
    n->clean_text = false;
    n->chinese_chars = false;
    n->lowercase = false;
    n->strip_accents = true;
    return n;
  }
  if (type == "Sequence") {
    auto n = std::make_unique<SequenceNormalizer>();
    for (const auto& s : j.at("normalizers")) n->steps.push_back(make_normalizer(s));
    return n;
  }
  throw BackendError("unsupported tokenizer normalizer '" + type + "'");
}

// ---------------------------------------------------------------------------
// Pre-tokenizers. Each maps a list of pieces to a refined list of pieces.

using Pieces = std::vector<std::vector<char32_t>>;

struct PreTokenizer {
  virtual ~PreTokenizer() = default;
  virtual Pieces apply(Pieces pieces) const = 0;
};

// Splits on whitespace and isolates punctuation characters.
struct BertPreTokenizer final : PreTokenizer {
  Pieces apply(Pieces pieces) const override {
    Pieces out;
    for (const auto& p : pieces) {
      std::vector<char32_t> cur;
      for (char32_t c : p) {
        if (is_whitespace(c)) {
          if (!cur.empty()) out.push_back(std::move(cur));
          cur.clear();
        } else if (is_punctuation(c)) {
          if (!cur.empty()) out.push_back(std::move(cur));
          cur.clear();
          out.push_back({c});
        } else {
          cur.push_back(c);
        }
      }
      if (!cur.empty()) out.push_back(std::move(cur));
    }
    return out;
  }
};

struct WhitespaceSplit final : PreTokenizer {
  Pieces apply(Pieces pieces) const override {
    Pieces out;
    for (const auto& p : pieces) {
      std::vector<char32_t> cur;
      for (char32_t c : p) {
        if (is_whitespace(c)) {
          if (!cur.empty()) out.push_back(std::move(cur));
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      if (!cur.empty()) out.push_back(std::move(cur));
    }
    return out;
  }
};

// \w+|[^\w\s]+
struct WhitespacePreTokenizer final : PreTokenizer {
  Pieces apply(Pieces pieces) const override {
    Pieces out;
    for (const auto& p : pieces) {
      std::size_t i = 0;
      while (i < p.size()) {
        if (is_whitespace(p[i])) {
          ++i;
          continue;
        }
        const bool word = is_letter(p[i]) || is_digit(p[i]) || p[i] == '_';
        std::size_t j = i;
        while (j < p.size() && !is_whitespace(p[j]) &&
               (is_letter(p[j]) || is_digit(p[j]) || p[j] == '_') == word) {
          ++j;
        }
        out.emplace_back(p.begin() + i, p.begin() + j);
        i = j;
      }
    }
    return out;
  }
};

const std::array<char32_t, 256>& byte_to_unicode() {
  static const std::array<char32_t, 256> table = [] {
    std::array<char32_t, 256> t{};
    std::array<bool, 256> direct{};
    for (int b = '!'; b <= '~'; ++b) direct[b] = true;
    for (int b = 0xA1; b <= 0xAC; ++b) direct[b] = true;
    for (int b = 0xAE; b <= 0xFF; ++b) direct[b] = true;
    char32_t next = 256;
    for (int b = 0; b < 256; ++b) t[b] = direct[b] ? static_cast<char32_t>(b) : next++;
    return t;
  }();
  return table;
}

// GPT-2 style splitting followed by the byte-to-unicode mapping:
// 's|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+
struct ByteLevelPreTokenizer final : PreTokenizer {
  bool add_prefix_space = true;
  bool use_regex = true;

  static std::vector<std::vector<char32_t>> split(const std::vector<char32_t>& s) {
    std::vector<std::vector<char32_t>> out;
    std::size_t i = 0;
    const std::size_t n = s.size();
    auto cls = [](char32_t c) {
      if (is_whitespace(c)) return 0;
      if (is_letter(c)) return 1;
      if (is_digit(c)) return 2;
      return 3;
    };
    while (i < n) {
      if (s[i] == '\'' && i + 1 < n) {
        static const std::array<std::u32string_view, 7> kContractions = {U"'s", U"'t", U"'re", U"'ve",
                                                                        U"'m", U"'ll", U"'d"};
        bool matched = false;
        for (auto c : kContractions) {
          if (i + c.size() <= n && std::equal(c.begin(), c.end(), s.begin() + i)) {
            out.emplace_back(s.begin() + i, s.begin() + i + c.size());
            i += c.size();
            matched = true;
            break;
          }
        }
        if (matched) continue;
      }
      std::size_t j = i;
      if (s[i] == ' ' && i + 1 < n && cls(s[i + 1]) != 0) ++j;
      const int k = cls(s[j]);
      if (k != 0) {
        std::size_t e = j + 1;
        while (e < n && cls(s[e]) == k) ++e;
        out.emplace_back(s.begin() + i, s.begin() + e);
        i = e;
        continue;
      }
      // Whitespace run: leave the last space for the following word.
      std::size_t e = i;
      while (e < n && is_whitespace(s[e])) ++e;
      if (e < n && e - i > 1) {
        out.emplace_back(s.begin() + i, s.begin() + e - 1);
        i = e - 1;
      } else if (e < n) {
        out.emplace_back(s.begin() + i, s.begin() + e);
        i = e;
      } else {
        out.emplace_back(s.begin() + i, s.begin() + e);
        i = e;
      }
    }
    return out;
  }

  Pieces apply(Pieces pieces) const override {
    Pieces out;
    const auto& table = byte_to_unicode();
    for (auto p : pieces) {
      if (add_prefix_space && (p.empty() || p.front() != ' ')) p.insert(p.begin(), ' ');
      auto parts = use_regex ? split(p) : Pieces{p};
      for (const auto& part : parts) {
        std::string bytes;
        for (char32_t c : part) utf8::append(bytes, c);
        std::vector<char32_t> mapped;
        for (unsigned char b : bytes) mapped.push_back(table[b]);
        out.push_back(std::move(mapped));
      }
    }
    return out;
  }
};

struct SequencePreTokenizer final : PreTokenizer {
  std::vector<std::unique_ptr<PreTokenizer>> steps;
  Pieces apply(Pieces pieces) const override {
    for (const auto& s : steps) pieces = s->apply(std::move(pieces));
    return pieces;
  }
};

struct NoPreTokenizer final : PreTokenizer {
  Pieces apply(Pieces pieces) const override { return pieces; }
};

std::unique_ptr<PreTokenizer> make_pre_tokenizer(const json& j) {
  if (j.is_null()) return std::make_unique<NoPreTokenizer>();
  const auto type = j.at("type").get<std::string>();
  if (type == "BertPreTokenizer") return std::make_unique<BertPreTokenizer>();
  if (type == "WhitespaceSplit") return std::make_unique<WhitespaceSplit>();
  if (type == "Whitespace") return std::make_unique<WhitespacePreTokenizer>();
  if (type == "ByteLevel") {
    auto p = std::make_unique<ByteLevelPreTokenizer>();
    p->add_prefix_space = j.value("add_prefix_space", true);
    p->use_regex = j.value("use_regex", true);
    return p;
  }
  if (type == "Sequence") {
    auto p = std::make_unique<SequencePreTokenizer>();
    for (const auto& s : j.at("pretokenizers")) p->steps.push_back(make_pre_tokenizer(s));
    return p;
  }
  throw BackendError("unsupported tokenizer pre_tokenizer '" + type + "'");
}

// ---------------------------------------------------------------------------
// Models

using Vocab = std::unordered_map<std::string, std::int64_t>;

struct Model {
  Vocab vocab;
  virtual ~Model() = default;
  virtual void tokenize_word(const std::vector<char32_t>& word, Encoding& out) const = 0;

  std::int64_t id_of(const std::string& token) const {
    auto it = vocab.find(token);
    if (it == vocab.end()) throw BackendError("token '" + token + "' missing from vocabulary");
    return it->second;
  }
};

struct WordPieceModel final : Model {
  std::string unk_token = "[UNK]";
  std::string prefix = "##";
  std::size_t max_chars = 100;

  void tokenize_word(const std::vector<char32_t>& word, Encoding& out) const override {
    if (word.size() > max_chars) {
      out.append(unk_token, id_of(unk_token), 0, false);
      return;
    }
    std::vector<std::pair<std::string, std::int64_t>> pieces;
    std::size_t start = 0;
    while (start < word.size()) {
      std::size_t end = word.size();
      std::optional<std::pair<std::string, std::int64_t>> found;
      while (start < end) {
        std::string sub = start > 0 ? prefix : std::string();
        for (std::size_t k = start; k < end; ++k) utf8::append(sub, word[k]);
        if (auto it = vocab.find(sub); it != vocab.end()) {
          found.emplace(sub, it->second);
          break;
        }
        --end;
      }
      if (!found) {
        out.append(unk_token, id_of(unk_token), 0, false);
        return;
      }
      pieces.push_back(std::move(*found));
      start = end;
    }
    for (auto& [tok, id] : pieces) out.append(tok, id, 0, false);
  }
};

struct PairHash {
  std::size_t operator()(const std::pair<std::string, std::string>& p) const {
    const std::size_t h1 = std::hash<std::string>{}(p.first);
    const std::size_t h2 = std::hash<std::string>{}(p.second);
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
  }
};

struct BpeModel final : Model {
  std::unordered_map<std::pair<std::string, std::string>, std::size_t, PairHash> ranks;
  std::optional<std::string> unk_token;
  std::string prefix;
  std::string suffix;

  void tokenize_word(const std::vector<char32_t>& word, Encoding& out) const override {
    std::vector<std::string> symbols;
    for (std::size_t i = 0; i < word.size(); ++i) {
      std::string s = (i > 0) ? prefix : std::string();
      utf8::append(s, word[i]);
      if (i + 1 == word.size()) s += suffix;
      symbols.push_back(std::move(s));
    }
    while (symbols.size() > 1) {
      std::size_t best = SIZE_MAX;
      std::size_t at = 0;
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
        auto it = ranks.find({symbols[i], symbols[i + 1]});
        if (it != ranks.end() && it->second < best) {
          best = it->second;
          at = i;
        }
      }
      if (best == SIZE_MAX) break;
      std::string right = symbols[at + 1];
      if (!prefix.empty() && right.rfind(prefix, 0) == 0) right.erase(0, prefix.size());
      std::string left = symbols[at];
      if (!suffix.empty() && left.size() >= suffix.size() &&
          left.compare(left.size() - suffix.size(), suffix.size(), suffix) == 0 && at + 2 < symbols.size()) {
        left.erase(left.size() - suffix.size());
      }
      symbols[at] = left + right;
      symbols.erase(symbols.begin() + static_cast<std::ptrdiff_t>(at) + 1);
    }
    for (const auto& s : symbols) {
      auto it = vocab.find(s);
      if (it != vocab.end()) {
        out.append(s, it->second, 0, false);
      } else if (unk_token) {
        out.append(*unk_token, id_of(*unk_token), 0, false);
      } else {
        throw BackendError("BPE symbol '" + s + "' is not in the vocabulary and no unk_token is set");
      }
    }
  }
};

std::unique_ptr<Model> make_model(const json& j) {
  const auto type = j.value("type", std::string(j.contains("merges") ? "BPE" : "WordPiece"));
  if (type == "WordPiece") {
    auto m = std::make_unique<WordPieceModel>();
    m->vocab = j.at("vocab").get<Vocab>();
    m->unk_token = j.value("unk_token", std::string("[UNK]"));
    m->prefix = j.value("continuing_subword_prefix", std::string("##"));
    m->max_chars = j.value("max_input_chars_per_word", std::size_t{100});
    return m;
  }
  if (type == "BPE") {
    auto m = std::make_unique<BpeModel>();
    m->vocab = j.at("vocab").get<Vocab>();
    if (j.contains("unk_token") && j["unk_token"].is_string()) m->unk_token = j["unk_token"].get<std::string>();
    if (j.contains("continuing_subword_prefix") && j["continuing_subword_prefix"].is_string()) {
      m->prefix = j["continuing_subword_prefix"].get<std::string>();
    }
    if (j.contains("end_of_word_suffix") && j["end_of_word_suffix"].is_string()) {
      m->suffix = j["end_of_word_suffix"].get<std::string>();
    }
    std::size_t rank = 0;
    for (const auto& merge : j.at("merges")) {
      std::pair<std::string, std::string> key;
      if (merge.is_string()) {
        const auto s = merge.get<std::string>();
        const auto sp = s.find(' ');
        if (sp == std::string::npos) throw BackendError("malformed BPE merge '" + s + "'");
        key = {s.substr(0, sp), s.substr(sp + 1)};
      } else {
        key = {merge.at(0).get<std::string>(), merge.at(1).get<std::string>()};
      }
      m->ranks.emplace(std::move(key), rank++);
    }
    return m;
  }
  throw BackendError("unsupported tokenizer model '" + type + "'");
}

// ---------------------------------------------------------------------------
// Post-processing templates

struct TemplatePiece {
  bool is_sequence = false;
  int sequence = 0;  // 0 = A, 1 = B
  std::string special;
  std::int64_t type_id = 0;
};

struct SpecialToken {
  std::vector<std::string> tokens;
  std::vector<std::int64_t> ids;
};

}  // namespace

struct SubwordTokenizer::Impl {
  std::unique_ptr<Normalizer> normalizer;
  std::unique_ptr<PreTokenizer> pre_tokenizer;
  std::unique_ptr<Model> model;
  std::vector<TemplatePiece> single;
  std::vector<TemplatePiece> pair;
  std::map<std::string, SpecialToken> specials;
  std::size_t vocab_size = 0;

  void load_post_processor(const json& j);
  std::size_t count_specials(const std::vector<TemplatePiece>& t) const {
    std::size_t n = 0;
    for (const auto& p : t) {
      if (!p.is_sequence) n += specials.at(p.special).ids.size();
    }
    return n;
  }
};

namespace {

std::vector<TemplatePiece> parse_template(const json& pieces) {
  std::vector<TemplatePiece> out;
  for (const auto& p : pieces) {
    TemplatePiece t;
    if (p.contains("Sequence")) {
      t.is_sequence = true;
      t.sequence = p["Sequence"].at("id").get<std::string>() == "B" ? 1 : 0;
      t.type_id = p["Sequence"].value("type_id", 0);
    } else {
      t.special = p.at("SpecialToken").at("id").get<std::string>();
      t.type_id = p["SpecialToken"].value("type_id", 0);
    }
    out.push_back(std::move(t));
  }
  return out;
}

TemplatePiece special_piece(const std::string& tok, std::int64_t type_id = 0) {
  TemplatePiece t;
  t.special = tok;
  t.type_id = type_id;
  return t;
}

TemplatePiece sequence_piece(int seq, std::int64_t type_id) {
  TemplatePiece t;
  t.is_sequence = true;
  t.sequence = seq;
  t.type_id = type_id;
  return t;
}

}  // namespace

void SubwordTokenizer::Impl::load_post_processor(const json& j) {
  if (j.is_null()) {
    single = {sequence_piece(0, 0)};
    pair = {sequence_piece(0, 0), sequence_piece(1, 1)};
    return;
  }
  const auto type = j.at("type").get<std::string>();
  if (type == "TemplateProcessing") {
    single = parse_template(j.at("single"));
    pair = parse_template(j.at("pair"));
    for (const auto& [name, spec] : j.at("special_tokens").items()) {
      specials[name] = {spec.at("tokens").get<std::vector<std::string>>(),
                        spec.at("ids").get<std::vector<std::int64_t>>()};
    }
    return;
  }
  if (type == "BertProcessing" || type == "RobertaProcessing") {
    const auto cls = j.at("cls").at(0).get<std::string>();
    const auto sep = j.at("sep").at(0).get<std::string>();
    specials[cls] = {{cls}, {j["cls"].at(1).get<std::int64_t>()}};
    specials[sep] = {{sep}, {j["sep"].at(1).get<std::int64_t>()}};
    if (type == "BertProcessing") {
      single = {special_piece(cls), sequence_piece(0, 0), special_piece(sep)};
      pair = {special_piece(cls), sequence_piece(0, 0), special_piece(sep), sequence_piece(1, 1),
              special_piece(sep, 1)};
    } else {
      single = {special_piece(cls), sequence_piece(0, 0), special_piece(sep)};
      pair = {special_piece(cls), sequence_piece(0, 0), special_piece(sep), special_piece(sep),
              sequence_piece(1, 0), special_piece(sep)};
    }
    return;
  }
  if (type == "Sequence") {
    for (const auto& p : j.at("processors")) {
      const auto t = p.at("type").get<std::string>();
      if (t == "TemplateProcessing" || t == "BertProcessing" || t == "RobertaProcessing") {
        load_post_processor(p);
        return;
      }
    }
    load_post_processor(json(nullptr));
    return;
  }
  if (type == "ByteLevel") {
    load_post_processor(json(nullptr));
    return;
  }
  throw BackendError("unsupported tokenizer post_processor '" + type + "'");
}

SubwordTokenizer::SubwordTokenizer(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
SubwordTokenizer::SubwordTokenizer(SubwordTokenizer&&) noexcept = default;
SubwordTokenizer& SubwordTokenizer::operator=(SubwordTokenizer&&) noexcept = default;
SubwordTokenizer::~SubwordTokenizer() = default;

SubwordTokenizer SubwordTokenizer::from_json(std::string_view json_text) {
  auto impl = std::make_unique<Impl>();
  try {
    const auto j = json::parse(json_text);
    impl->normalizer = make_normalizer(j.contains("normalizer") ? j["normalizer"] : json(nullptr));
    impl->pre_tokenizer = make_pre_tokenizer(j.contains("pre_tokenizer") ? j["pre_tokenizer"] : json(nullptr));
    impl->model = make_model(j.at("model"));
    impl->load_post_processor(j.contains("post_processor") ? j["post_processor"] : json(nullptr));
    std::int64_t max_id = -1;
    for (const auto& [tok, id] : impl->model->vocab) max_id = std::max(max_id, id);
    if (j.contains("added_tokens")) {
      for (const auto& t : j["added_tokens"]) {
        const auto id = t.at("id").get<std::int64_t>();
        max_id = std::max(max_id, id);
        impl->model->vocab.emplace(t.at("content").get<std::string>(), id);
      }
    }
    impl->vocab_size = static_cast<std::size_t>(max_id + 1);
    for (const auto& [name, spec] : impl->specials) {
      for (auto id : spec.ids) {
        if (id < 0 || id > max_id) throw BackendError("special token '" + name + "' has an out-of-range id");
      }
    }
  } catch (const json::exception& e) {
    throw BackendError(std::string("invalid tokenizer definition: ") + e.what());
  }
  return SubwordTokenizer(std::move(impl));
}

SubwordTokenizer SubwordTokenizer::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BackendError("cannot open tokenizer " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

Encoding SubwordTokenizer::tokenize(std::string_view text) const {
  auto normalized = impl_->normalizer->apply(utf8::decode(text));
  Pieces pieces{std::move(normalized)};
  pieces = impl_->pre_tokenizer->apply(std::move(pieces));
  Encoding out;
  for (const auto& p : pieces) {
    if (!p.empty()) impl_->model->tokenize_word(p, out);
  }
  return out;
}

Encoding SubwordTokenizer::add_special_tokens(const Encoding& first, const Encoding* second) const {
  const auto& tmpl = second ? impl_->pair : impl_->single;
  Encoding out;
  for (const auto& piece : tmpl) {
    if (piece.is_sequence) {
      const Encoding* src = piece.sequence == 0 ? &first : second;
      if (!src) continue;
      for (std::size_t i = 0; i < src->size(); ++i) {
        out.append(src->tokens[i], src->ids[i], piece.type_id, false);
      }
    } else {
      const auto& sp = impl_->specials.at(piece.special);
      for (std::size_t i = 0; i < sp.ids.size(); ++i) out.append(sp.tokens[i], sp.ids[i], piece.type_id, true);
    }
  }
  return out;
}

std::size_t SubwordTokenizer::num_special_tokens(bool pair) const {
  return impl_->count_specials(pair ? impl_->pair : impl_->single);
}

std::optional<std::int64_t> SubwordTokenizer::token_to_id(const std::string& token) const {
  auto it = impl_->model->vocab.find(token);
  if (it == impl_->model->vocab.end()) return std::nullopt;
  return it->second;
}

std::size_t SubwordTokenizer::vocab_size() const { return impl_->vocab_size; }

}  // namespace docasref
