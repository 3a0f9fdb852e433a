#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "docasref/dataset.hpp"
#include "docasref/embedding_cache.hpp"
#include "docasref/fixture_store.hpp"
#include "docasref/onnx_backend.hpp"
#include "docasref/token_metrics.hpp"
#include "json.hpp"
#include "suite.hpp"

namespace docasref::cli {
namespace {

using nlohmann::json;

// Backend, metric or I/O failure after the arguments were accepted.
class RunError : public Error {
 public:
  using Error::Error;
};

std::optional<std::filesystem::path> cache_dir_from_env() {
  const char* v = std::getenv("DOCASREF_CACHE_DIR");
  if (!v || !*v) return std::nullopt;
  return std::filesystem::path(v);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string one_source(const std::string& side, const std::string& text, const std::string& file) {
  const bool has_text = !text.empty();
  const bool has_file = !file.empty();
  if (has_text == has_file) {
    throw UsageError("give exactly one of --" + side + " and --" + side + "-file");
  }
  return has_text ? text : read_text_file(file);
}

void require_file(const std::string& flag, const std::string& path) {
  if (path.empty()) throw UsageError(flag + " is required");
  if (!std::filesystem::exists(path)) throw UsageError(flag + ": no such file " + path);
}

struct ScoreOptions {
  std::string metric;
  std::string component = "f";
  std::string variant = "r1";
  std::string backend = "onnx";
  std::string model;
  std::string nli_model;
  std::vector<std::string> fixtures;
  std::vector<std::string> nli_fixtures;
  std::string idf = "off";
  std::string idf_corpus;
  double leadword = 1.0;
  std::string sim_kind = "cosine";
  std::string weighting = "none";
  std::string summary;
  std::string summary_file;
  std::string document;
  std::string document_file;
};

struct BenchmarkOptions {
  std::string suite;
  std::string output;
  std::string format;
  int workers = 0;
};

struct VerifyOptions {
  std::string fixture;
  std::string model;
  double tolerance = 1e-4;
};

std::unique_ptr<Backend> onnx_session(const std::string& flag, const std::string& path) {
  require_file(flag, path);
  std::unique_ptr<Backend> b;
  try {
    b = std::make_unique<OnnxBackend>(load_model_config(path));
  } catch (const Error& e) {
    throw RunError(e.what());
  }
  if (auto dir = cache_dir_from_env()) return std::make_unique<CachingBackend>(std::move(b), *dir);
  return b;
}

int cmd_score(const ScoreOptions& o, std::ostream& out) {
  const auto summary = one_source("summary", o.summary, o.summary_file);
  const auto document_text = one_source("document", o.document, o.document_file);

  MetricSpec spec;
  if (o.metric == "rouge-1" || o.metric == "rouge-2" || o.metric == "rouge-l") {
    spec.kind = MetricKind::rouge;
    spec.variant = parse_rouge_variant(o.metric);
  } else {
    try {
      spec.kind = parse_metric_kind(o.metric);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    if (spec.kind == MetricKind::external) throw UsageError("external scores cannot be computed by 'score'");
    if (spec.kind == MetricKind::rouge) spec.variant = parse_rouge_variant(o.variant);
  }
  try {
    spec.sim_kind = parse_sim_kind(o.sim_kind);
    spec.weighting = parse_weighting(o.weighting);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (!(o.leadword > 0.0 && o.leadword <= 1.0)) throw UsageError("--leadword must lie in (0, 1]");
  spec.leadword_k = o.leadword;
  spec.use_idf = o.idf == "on";
  if (spec.use_idf && spec.kind != MetricKind::bertscore) throw UsageError("--idf on applies to bertscore only");
  if (spec.use_idf && o.idf_corpus.empty()) throw UsageError("--idf on needs --idf-corpus <dataset.jsonl>");

  std::unique_ptr<Backend> backend;
  if (spec.needs_backend()) {
    const bool nli = spec.kind == MetricKind::sentence_bertscore && spec.sim_kind != SentenceSimKind::cosine;
    if (o.backend == "onnx") {
      if (nli && !o.nli_model.empty()) {
        backend = onnx_session("--nli-model", o.nli_model);
      } else {
        backend = onnx_session("--model", o.model);
      }
    } else {
      if (o.fixtures.empty() && o.nli_fixtures.empty()) throw UsageError("--backend fixture needs --fixture <path>");
      for (const auto& f : o.fixtures) require_file("--fixture", f);
      for (const auto& f : o.nli_fixtures) require_file("--nli-fixture", f);
      auto store = std::make_shared<FixtureStore>();
      try {
        for (const auto& f : o.fixtures) store->add_file(f);
        for (const auto& f : o.nli_fixtures) store->add_nli_file(f);
      } catch (const Error& e) {
        throw RunError(e.what());
      }
      backend = std::make_unique<FixtureBackend>(store);
    }
  }

  Document doc{"document", document_text, std::nullopt};
  MetricValue value;
  try {
    if (o.leadword != 1.0) doc = leadword_filter(doc, o.leadword);
    std::optional<IdfTable> idf;
    if (spec.use_idf) {
      require_file("--idf-corpus", o.idf_corpus);
      idf = dataset_idf(load_dataset(o.idf_corpus), *backend);
    }
    switch (spec.kind) {
      case MetricKind::bertscore: {
        GreedyMatchConfig cfg;
        cfg.use_idf = spec.use_idf;
        value = MetricValue::of(bertscore_reffree(summary, doc.text, cfg, *backend, idf ? &*idf : nullptr));
        break;
      }
      case MetricKind::moverscore:
        value = MetricValue::of(moverscore_greedy(summary, doc.text, {}, *backend));
        break;
      case MetricKind::rouge:
        value = MetricValue::of(rouge_reffree(summary, doc.text, spec.variant));
        break;
      case MetricKind::sentence_bertscore: {
        SentenceSimConfig cfg;
        cfg.sim_kind = spec.sim_kind;
        cfg.weighting = spec.weighting;
        value = MetricValue::of(sentence_bertscore(summary, doc.text, cfg, *backend));
        break;
      }
      case MetricKind::external:
        break;
    }
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw RunError(e.what());
  }

  json j;
  j["metric"] = spec.display_name();
  if (value.scalar) {
    j["component"] = "scalar";
    j["value"] = *value.scalar;
  } else {
    Component c;
    try {
      c = parse_component(o.component);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    if (c == Component::scalar) throw UsageError(spec.display_name() + " has no scalar component");
    j["precision"] = value.triple.precision;
    j["recall"] = value.triple.recall;
    j["f1"] = value.triple.f1;
    j["component"] = to_string(c);
    j["value"] = value.component(c);
  }
  out << j.dump() << '\n';
  return 0;
}

int cmd_benchmark(const BenchmarkOptions& o, std::ostream& out, std::ostream& err) {
  require_file("--suite", o.suite);
  auto suite = load_suite(o.suite);
  if (!o.format.empty()) {
    try {
      suite.format = parse_report_format(o.format);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (!o.output.empty()) suite.output_path = o.output;
  if (o.workers > 0) suite.workers = o.workers;

  std::string report_text;
  CorrelationReport report;
  try {
    const auto dataset = load_dataset(suite.dataset_path);
    std::vector<MetricSpec> specs;
    for (auto& m : suite.metrics) {
      if (m.external_path) {
        auto ext = ingest_external_scores(*m.external_path, &dataset);
        for (const auto& w : ext.warnings) err << "warning: " << w << '\n';
        m.spec.external = std::move(ext.run);
      }
      specs.push_back(m.spec);
    }
    const auto factory = make_backend_factory(suite.backend, cache_dir_from_env());
    report = run_benchmark(dataset, specs, suite.pooling, factory, suite.workers);
    report_text = render_report(report, suite.format);
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw RunError(e.what());
  }

  json summary{{"dataset", report.dataset_name}, {"pooling", to_string(report.pooling)}, {"rows", report.rows.size()}};
  if (suite.output_path) {
    std::ofstream f(*suite.output_path, std::ios::binary);
    if (!f) throw RunError("cannot write report " + suite.output_path->string());
    f << report_text;
    summary["output"] = suite.output_path->string();
    out << summary.dump() << '\n';
  } else {
    out << report_text;
  }
  return 0;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  require_file("--fixture", o.fixture);
  require_file("--model", o.model);
  FixtureFile fixture;
  std::unique_ptr<OnnxBackend> backend;
  try {
    fixture = read_fixture_file(o.fixture, FixtureLoadOptions{false});
    backend = std::make_unique<OnnxBackend>(load_model_config(o.model));
  } catch (const Error& e) {
    throw RunError(e.what());
  }
  double worst = 0.0;
  std::vector<std::string> failing;
  for (const auto& item : fixture.items) {
    std::string problem;
    double dev = 0.0;
    if (!item.text) {
      problem = "no source text recorded";
    } else {
      try {
        const auto seq = backend->embed_tokens(*item.text);
        if (seq.tokens != item.sequence.tokens) {
          problem = "token mismatch";
        } else if (seq.dim() != item.sequence.dim()) {
          problem = "dimension mismatch";
        } else {
          for (std::size_t k = 0; k < seq.vectors.values().size(); ++k) {
            const double d = std::abs(seq.vectors.values()[k] - item.sequence.vectors.values()[k]);
            dev = std::isnan(d) ? INFINITY : std::max(dev, d);
          }
        }
      } catch (const Error& e) {
        problem = e.what();
      }
    }
    if (problem.empty() && dev > o.tolerance) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "max deviation %.3g", dev);
      problem = buf;
    }
    worst = std::max(worst, problem.empty() ? dev : std::max(dev, o.tolerance));
    if (!problem.empty()) {
      failing.push_back(item.id);
      err << "fixture item '" << item.id << "': " << problem << '\n';
    }
  }
  json j{{"fixture", o.fixture},
         {"items", fixture.items.size()},
         {"max_deviation", worst},
         {"tolerance", o.tolerance},
         {"failing", failing}};
  out << j.dump() << '\n';
  return failing.empty() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reference-free summary evaluation with the document as reference", "docasref"};
  app.require_subcommand(1);

  ScoreOptions score;
  auto* sc = app.add_subcommand("score", "Score one (summary, document) pair");
  sc->add_option("--metric", score.metric, "bertscore | moverscore | rouge | rouge-1 | rouge-2 | rouge-l | sentbert")
      ->required();
  sc->add_option("--component", score.component, "p | r | f")->check(CLI::IsMember({"p", "r", "f"}));
  sc->add_option("--variant", score.variant, "ROUGE variant: r1 | r2 | rl")->check(CLI::IsMember({"r1", "r2", "rl"}));
  sc->add_option("--backend", score.backend, "onnx | fixture")->check(CLI::IsMember({"onnx", "fixture"}));
  sc->add_option("--model", score.model, "Model config JSON (onnx backend)");
  sc->add_option("--nli-model", score.nli_model, "NLI model config JSON for sentbert NLI similarities");
  sc->add_option("--fixture", score.fixtures, "Embedding fixture file (fixture backend, repeatable)");
  sc->add_option("--nli-fixture", score.nli_fixtures, "NLI fixture file (fixture backend, repeatable)");
  sc->add_option("--idf", score.idf, "on | off")->check(CLI::IsMember({"on", "off"}));
  sc->add_option("--idf-corpus", score.idf_corpus, "Dataset JSONL whose documents define IDF statistics");
  sc->add_option("--leadword", score.leadword, "Keep the leading fraction k of document sentences");
  sc->add_option("--sim-kind", score.sim_kind, "cosine | nli_1mN | nli_EmC | nli_E");
  sc->add_option("--weighting", score.weighting, "none | sum | entropy");
  sc->add_option("--summary", score.summary, "Summary text");
  sc->add_option("--summary-file", score.summary_file, "File holding the summary");
  sc->add_option("--document", score.document, "Document text");
  sc->add_option("--document-file", score.document_file, "File holding the document");

  BenchmarkOptions bench;
  auto* bc = app.add_subcommand("benchmark", "Run a metric suite and write a correlation report");
  bc->add_option("--suite", bench.suite, "Suite config JSON")->required();
  bc->add_option("--output", bench.output, "Report path (overrides the suite)");
  bc->add_option("--format", bench.format, "csv | markdown (overrides the suite)");
  bc->add_option("--workers", bench.workers, "Worker threads (overrides the suite)");

  VerifyOptions verify;
  auto* fx = app.add_subcommand("fixtures", "Fixture maintenance");
  fx->require_subcommand(1);
  auto* vc = fx->add_subcommand("verify", "Re-embed fixture texts and compare against the stored vectors");
  vc->add_option("--fixture", verify.fixture, "Fixture JSON")->required();
  vc->add_option("--model", verify.model, "Model config JSON")->required();
  vc->add_option("--tolerance", verify.tolerance, "Largest accepted per-element deviation");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  try {
    if (sc->parsed()) return cmd_score(score, out);
    if (bc->parsed()) return cmd_benchmark(bench, out, err);
    if (vc->parsed()) return cmd_verify(verify, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace docasref::cli
