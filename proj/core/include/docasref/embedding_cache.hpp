#pragma once

#include <filesystem>
#include <memory>

#include "docasref/backend.hpp"

namespace docasref {

/// Wraps a backend and persists embed_tokens results under `dir`, one
/// fixture-format JSON file per (cache key, text).
class CachingBackend final : public Backend {
 public:
  CachingBackend(std::unique_ptr<Backend> inner, std::filesystem::path dir);

  EmbeddingSequence embed_tokens(std::string_view text) override;
  NliDistribution nli_probs(std::string_view premise, std::string_view hypothesis) override {
    return inner_->nli_probs(premise, hypothesis);
  }
  std::vector<std::string> tokenize(std::string_view text) override { return inner_->tokenize(text); }
  std::string model_id() const override { return inner_->model_id(); }
  std::string cache_key() const override { return inner_->cache_key(); }

  std::filesystem::path entry_path(std::string_view text) const;

 private:
  std::unique_ptr<Backend> inner_;
  std::filesystem::path dir_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace docasref
