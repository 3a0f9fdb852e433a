#include "docasref/embedding_cache.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include "docasref/fixture_store.hpp"

namespace docasref {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CachingBackend::CachingBackend(std::unique_ptr<Backend> inner, std::filesystem::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw BackendError("cannot create cache directory " + dir_.string() + ": " + ec.message());
}

std::filesystem::path CachingBackend::entry_path(std::string_view text) const {
  std::string key = inner_->cache_key();
  key.push_back('\0');
  key.append(text);
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.json", static_cast<unsigned long long>(fnv1a64(key)));
  return dir_ / name;
}

EmbeddingSequence CachingBackend::embed_tokens(std::string_view text) {
  const auto path = entry_path(text);
  if (std::filesystem::exists(path)) {
    try {
      auto file = read_fixture_file(path);
      if (file.items.size() == 1 && file.items[0].text && *file.items[0].text == text &&
          file.model_id == inner_->model_id()) {
        return std::move(file.items[0].sequence);
      }
    } catch (const BackendError&) {
      // Unreadable entries are recomputed and overwritten.
    }
  }
  auto seq = inner_->embed_tokens(text);
  FixtureFile file;
  file.model_id = seq.model_id;
  file.layer = seq.layer;
  file.dim = seq.dim();
  file.items.push_back({"cache", std::string(text), seq});
  // Write to a unique temporary name first so concurrent workers never read a partial file.
  std::random_device rd;
  auto tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  save_fixture(file, tmp);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) std::filesystem::remove(tmp, ec);
  return seq;
}

}  // namespace docasref
