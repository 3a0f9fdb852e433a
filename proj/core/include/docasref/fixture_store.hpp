#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "docasref/backend.hpp"

namespace docasref {

struct FixtureItem {
  std::string id;
  std::optional<std::string> text;  // source text, when recorded
  EmbeddingSequence sequence;
};

struct FixtureFile {
  std::string model_id;
  int layer = 0;
  std::size_t dim = 0;
  std::vector<FixtureItem> items;
};

struct FixtureLoadOptions {
  /// Reject rows whose L2 norm is not 1 within 1e-6.
  bool require_unit_rows = true;
};

/// Parses the embedding fixture JSON. Schema violations and vector-length
/// inconsistencies raise BackendError naming the item id.
FixtureFile read_fixture_file(const std::filesystem::path& path, FixtureLoadOptions options = {});
FixtureFile parse_fixture(std::istream& in, FixtureLoadOptions options = {});

/// Writes floats as shortest round-trip decimals, so a save/load round trip
/// is bitwise exact.
void save_fixture(const FixtureFile& fixture, std::ostream& out);
void save_fixture(const FixtureFile& fixture, const std::filesystem::path& path);

/// id -> sequence view of a fixture file.
std::map<std::string, EmbeddingSequence> load_fixture(const std::filesystem::path& path);

/// Immutable text-keyed store of precomputed embeddings and NLI outputs.
class FixtureStore {
 public:
  void add(const FixtureFile& fixture);
  void add_file(const std::filesystem::path& path);

  /// NLI fixture: {"model_id": str, "pairs": [{"premise", "hypothesis",
  /// "probs": [entail, neutral, contradict]}, ...]}.
  void add_nli_file(const std::filesystem::path& path);

  const EmbeddingSequence* find(std::string_view text) const;
  const NliDistribution* find_nli(std::string_view premise, std::string_view hypothesis) const;

  const std::string& model_id() const { return model_id_; }
  std::size_t size() const { return by_text_.size(); }

 private:
  std::string model_id_;
  std::map<std::string, EmbeddingSequence, std::less<>> by_text_;
  std::map<std::pair<std::string, std::string>, NliDistribution> nli_;
};

/// Hermetic backend answering from a FixtureStore. Texts missing from the
/// store raise BackendError.
class FixtureBackend final : public Backend {
 public:
  explicit FixtureBackend(std::shared_ptr<const FixtureStore> store) : store_(std::move(store)) {}

  EmbeddingSequence embed_tokens(std::string_view text) override;
  NliDistribution nli_probs(std::string_view premise, std::string_view hypothesis) override;
  std::string model_id() const override { return store_->model_id(); }

 private:
  std::shared_ptr<const FixtureStore> store_;
};

}  // namespace docasref
