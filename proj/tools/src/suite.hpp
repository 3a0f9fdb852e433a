#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "docasref/harness.hpp"

namespace docasref::cli {

/// Raised for configuration mistakes (unknown metric, bad value, missing
/// field). The CLI maps it to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class BackendKind { onnx, fixture };

struct BackendSettings {
  BackendKind kind = BackendKind::fixture;
  std::vector<std::filesystem::path> fixtures;      // fixture kind
  std::vector<std::filesystem::path> nli_fixtures;  // fixture kind
  std::map<std::string, std::filesystem::path> models;  // onnx kind: name -> model config JSON
};

struct SuiteMetric {
  MetricSpec spec;
  std::optional<std::filesystem::path> external_path;
};

struct SuiteConfig {
  std::filesystem::path dataset_path;
  BackendSettings backend;
  std::vector<SuiteMetric> metrics;
  Pooling pooling = Pooling::per_doc_mean;
  int workers = 1;
  ReportFormat format = ReportFormat::csv;
  std::optional<std::filesystem::path> output_path;
};

/// Parses a suite file. Relative paths resolve against the file's directory.
SuiteConfig load_suite(const std::filesystem::path& path);
SuiteConfig parse_suite(const std::string& json_text, const std::filesystem::path& base_dir);

/// Builds a factory handing out independent backend sessions. Sessions are
/// wrapped in an on-disk embedding cache when `cache_dir` is set.
BackendFactory make_backend_factory(const BackendSettings& settings,
                                    const std::optional<std::filesystem::path>& cache_dir);

}  // namespace docasref::cli
