#pragma once

#include <filesystem>
#include <iosfwd>

#include "docasref/types.hpp"

namespace docasref {

class DatasetError : public Error {
 public:
  using Error::Error;
};

/// Reads the normalized JSONL schema: a `meta` header line followed by `doc`
/// and `sum` lines. Row order is preserved. Errors carry the 1-based line
/// number of the offending line.
Dataset load_dataset(const std::filesystem::path& path);
Dataset parse_dataset(std::istream& in);

/// Writes the normalized JSONL schema (meta, docs, then summaries).
void save_dataset(const Dataset& dataset, std::ostream& out);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace docasref
