#include "suite.hpp"

#include <fstream>
#include <sstream>

#include "docasref/embedding_cache.hpp"
#include "docasref/fixture_store.hpp"
#include "docasref/onnx_backend.hpp"
#include "json.hpp"

namespace docasref::cli {
namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path fp(p);
  return fp.is_absolute() ? fp : base / fp;
}

template <typename T>
T value_or(const json& obj, const char* key, T fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw UsageError(where + ": field '" + key + "' has the wrong type");
  }
}

// Maps shorthand names such as "rouge-1" onto a kind plus variant.
MetricSpec spec_for_name(const std::string& name) {
  MetricSpec spec;
  if (name == "rouge-1" || name == "rouge-2" || name == "rouge-l") {
    spec.kind = MetricKind::rouge;
    spec.variant = parse_rouge_variant(name);
    return spec;
  }
  try {
    spec.kind = parse_metric_kind(name);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return spec;
}

SuiteMetric parse_metric(const json& m, const std::filesystem::path& base, std::size_t index) {
  const std::string where = "metrics[" + std::to_string(index) + "]";
  if (!m.is_object()) throw UsageError(where + ": must be an object");
  const auto name = value_or<std::string>(m, "name", "", where);
  if (name.empty()) throw UsageError(where + ": missing metric name");
  SuiteMetric out;
  out.spec = spec_for_name(name);
  auto& spec = out.spec;
  try {
    spec.label = value_or<std::string>(m, "label", "", where);
    if (m.contains("variant")) spec.variant = parse_rouge_variant(value_or<std::string>(m, "variant", "r1", where));
    const bool scalar = spec.kind == MetricKind::moverscore || spec.kind == MetricKind::external;
    spec.component = parse_component(value_or<std::string>(m, "component", scalar ? "scalar" : "f", where));
    spec.use_idf = value_or<bool>(m, "use_idf", false, where);
    spec.sim_kind = parse_sim_kind(value_or<std::string>(m, "sim_kind", "cosine", where));
    spec.weighting = parse_weighting(value_or<std::string>(m, "weighting", "none", where));
    spec.leadword_k = value_or<double>(m, "leadword_k", 1.0, where);
    spec.model = value_or<std::string>(m, "model", "", where);
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(where + ": " + e.what());
  }
  if (!(spec.leadword_k > 0.0 && spec.leadword_k <= 1.0)) throw UsageError(where + ": leadword_k must lie in (0, 1]");
  if (spec.kind == MetricKind::external) {
    const auto path = value_or<std::string>(m, "path", "", where);
    if (path.empty()) throw UsageError(where + ": external metrics need a 'path'");
    out.external_path = resolve(base, path);
  }
  return out;
}

}  // namespace

SuiteConfig parse_suite(const std::string& json_text, const std::filesystem::path& base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("suite is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("suite must be a JSON object");
  SuiteConfig cfg;
  const auto dataset = value_or<std::string>(j, "dataset", "", "suite");
  if (dataset.empty()) throw UsageError("suite: missing 'dataset'");
  cfg.dataset_path = resolve(base, dataset);

  if (auto b = j.find("backend"); b != j.end() && b->is_object()) {
    const auto kind = value_or<std::string>(*b, "kind", "fixture", "backend");
    if (kind == "fixture") {
      cfg.backend.kind = BackendKind::fixture;
      for (const auto& f : value_or<std::vector<std::string>>(*b, "fixtures", {}, "backend")) {
        cfg.backend.fixtures.push_back(resolve(base, f));
      }
      for (const auto& f : value_or<std::vector<std::string>>(*b, "nli_fixtures", {}, "backend")) {
        cfg.backend.nli_fixtures.push_back(resolve(base, f));
      }
    } else if (kind == "onnx") {
      cfg.backend.kind = BackendKind::onnx;
      for (const auto& [name, path] : value_or<std::map<std::string, std::string>>(*b, "models", {}, "backend")) {
        cfg.backend.models[name] = resolve(base, path);
      }
    } else {
      throw UsageError("backend: unknown kind '" + kind + "' (expected onnx or fixture)");
    }
  }

  try {
    cfg.pooling = parse_pooling(value_or<std::string>(j, "pooling", "per_doc_mean", "suite"));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  cfg.workers = value_or<int>(j, "workers", 1, "suite");
  if (cfg.workers < 1) throw UsageError("suite: workers must be at least 1");

  const auto metrics = j.find("metrics");
  if (metrics == j.end() || !metrics->is_array() || metrics->empty()) {
    throw UsageError("suite: 'metrics' must be a non-empty array");
  }
  for (std::size_t k = 0; k < metrics->size(); ++k) cfg.metrics.push_back(parse_metric((*metrics)[k], base, k));

  if (auto o = j.find("output"); o != j.end() && o->is_object()) {
    try {
      cfg.format = parse_report_format(value_or<std::string>(*o, "format", "csv", "output"));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    const auto path = value_or<std::string>(*o, "path", "", "output");
    if (!path.empty()) cfg.output_path = resolve(base, path);
  }

  if (cfg.backend.kind == BackendKind::onnx) {
    for (auto& m : cfg.metrics) {
      if (!m.spec.needs_backend()) continue;
      if (m.spec.model.empty() && cfg.backend.models.size() == 1) m.spec.model = cfg.backend.models.begin()->first;
      if (!cfg.backend.models.count(m.spec.model)) {
        throw UsageError("metric '" + m.spec.display_name() + "' names unknown model '" + m.spec.model + "'");
      }
    }
  }
  return cfg;
}

SuiteConfig load_suite(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open suite " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_suite(buf.str(), path.parent_path());
}

BackendFactory make_backend_factory(const BackendSettings& settings,
                                    const std::optional<std::filesystem::path>& cache_dir) {
  auto wrap = [cache_dir](std::unique_ptr<Backend> b) -> std::unique_ptr<Backend> {
    if (!cache_dir) return b;
    return std::make_unique<CachingBackend>(std::move(b), *cache_dir);
  };
  if (settings.kind == BackendKind::fixture) {
    auto store = std::make_shared<FixtureStore>();
    for (const auto& f : settings.fixtures) store->add_file(f);
    for (const auto& f : settings.nli_fixtures) store->add_nli_file(f);
    std::shared_ptr<const FixtureStore> shared = store;
    return [shared](const std::string&) -> std::unique_ptr<Backend> {
      return std::make_unique<FixtureBackend>(shared);
    };
  }
  // Models load once and are shared; each call yields a fresh session.
  auto models = std::make_shared<std::map<std::string, std::shared_ptr<const OnnxModel>>>();
  for (const auto& [name, path] : settings.models) (*models)[name] = OnnxModel::load(load_model_config(path));
  return [models, wrap](const std::string& name) -> std::unique_ptr<Backend> {
    auto it = models->find(name);
    if (it == models->end()) throw BackendError("no model named '" + name + "' is configured");
    return wrap(std::make_unique<OnnxBackend>(it->second));
  };
}

}  // namespace docasref::cli
