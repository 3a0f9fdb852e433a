#include "docasref/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "docasref/correlation.hpp"
#include "docasref/embedding_cache.hpp"
#include "docasref/text.hpp"
#include "docasref/token_metrics.hpp"

namespace docasref {

MetricKind parse_metric_kind(const std::string& name) {
  if (name == "bertscore") return MetricKind::bertscore;
  if (name == "moverscore") return MetricKind::moverscore;
  if (name == "rouge") return MetricKind::rouge;
  if (name == "sentbert" || name == "sentence_bertscore") return MetricKind::sentence_bertscore;
  if (name == "external") return MetricKind::external;
  throw Error("unknown metric '" + name + "' (expected bertscore, moverscore, rouge, sentbert or external)");
}

const char* to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::bertscore: return "bertscore";
    case MetricKind::moverscore: return "moverscore";
    case MetricKind::rouge: return "rouge";
    case MetricKind::sentence_bertscore: return "sentbert";
    case MetricKind::external: return "external";
  }
  return "?";
}

Pooling parse_pooling(const std::string& name) {
  if (name == "per_doc_mean") return Pooling::per_doc_mean;
  if (name == "pooled") return Pooling::pooled;
  throw Error("unknown pooling '" + name + "' (expected per_doc_mean or pooled)");
}

const char* to_string(Pooling pooling) { return pooling == Pooling::pooled ? "pooled" : "per_doc_mean"; }

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  throw Error("unknown report format '" + name + "' (expected csv or markdown)");
}

namespace {

std::string format_ratio(double k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", k);
  return buf;
}

}  // namespace

std::string MetricSpec::display_name() const {
  if (!label.empty()) return label;
  std::string name;
  switch (kind) {
    case MetricKind::bertscore: name = "bertscore"; break;
    case MetricKind::moverscore: name = "moverscore"; break;
    case MetricKind::rouge: name = to_string(variant); break;
    case MetricKind::sentence_bertscore:
      name = std::string("sentbert-") + to_string(sim_kind) + "-" + to_string(weighting);
      break;
    case MetricKind::external: name = external ? external->metric_name : "external"; break;
  }
  if (use_idf) name += "+idf";
  if (leadword_k != 1.0) name += "@lead" + format_ratio(leadword_k);
  return name;
}

bool MetricSpec::needs_backend() const {
  return kind == MetricKind::bertscore || kind == MetricKind::moverscore || kind == MetricKind::sentence_bertscore;
}

std::string MetricSpec::describe() const {
  std::ostringstream os;
  os << "kind=" << to_string(kind) << ";component=" << to_string(component) << ";idf=" << use_idf
     << ";variant=" << to_string(variant) << ";sim=" << to_string(sim_kind) << ";weighting=" << to_string(weighting)
     << ";lead=" << format_ratio(leadword_k) << ";model=" << model;
  if (external) os << ";external=" << external->metric_name << "/" << external->config_digest;
  return os.str();
}

std::string correlation_unit(const Dataset& dataset, const std::string& doc_id) {
  const Document* d = dataset.find_document(doc_id);
  if (!d) throw Error("unknown document '" + doc_id + "'");
  return d->doc_group ? *d->doc_group : d->id;
}

std::vector<Document> documents_for(const Dataset& dataset, const std::string& doc_id) {
  const Document* d = dataset.find_document(doc_id);
  if (!d) throw Error("unknown document '" + doc_id + "'");
  if (!d->doc_group) return {*d};
  std::vector<Document> out;
  for (const auto& other : dataset.documents) {
    if (other.doc_group == d->doc_group) out.push_back(other);
  }
  return out;
}

namespace {

std::optional<double> correlation_of(CorrelationKind kind, const std::vector<double>& xs, const std::vector<double>& ys) {
  return kind == CorrelationKind::spearman ? spearman(xs, ys) : pearson(xs, ys);
}

}  // namespace

CorrelationValue summary_level_correlation(const Dataset& dataset, const MetricRun& run, const std::string& aspect,
                                           CorrelationKind kind, Pooling pooling) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> units;
  std::vector<double> all_x;
  std::vector<double> all_y;
  for (const auto& s : dataset.summaries) {
    auto rating = s.ratings.find(aspect);
    if (rating == s.ratings.end()) continue;
    auto score = run.scores.find({s.doc_id, s.system_id});
    if (score == run.scores.end()) continue;
    auto& u = units[correlation_unit(dataset, s.doc_id)];
    u.first.push_back(score->second);
    u.second.push_back(rating->second);
    all_x.push_back(score->second);
    all_y.push_back(rating->second);
  }
  CorrelationValue out;
  if (pooling == Pooling::pooled) {
    if (all_x.size() < 2) return out;
    out.value = correlation_of(kind, all_x, all_y);
    out.n_units = out.value ? all_x.size() : 0;
    return out;
  }
  double total = 0.0;
  for (const auto& [unit, xy] : units) {
    if (xy.first.size() < 2) continue;
    if (auto c = correlation_of(kind, xy.first, xy.second)) {
      total += *c;
      ++out.n_units;
    }
  }
  if (out.n_units > 0) out.value = total / static_cast<double>(out.n_units);
  return out;
}

IdfTable dataset_idf(const Dataset& dataset, Backend& backend) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(dataset.documents.size());
  for (const auto& d : dataset.documents) docs.push_back(backend.tokenize(d.text));
  return compute_idf(docs);
}

namespace {

// Backend sessions owned by one worker thread, created on first use.
class WorkerBackends {
 public:
  explicit WorkerBackends(const BackendFactory& factory) : factory_(factory) {}

  Backend& get(const std::string& name) {
    auto it = sessions_.find(name);
    if (it != sessions_.end()) return *it->second;
    if (!factory_) throw Error("no backend is configured for model '" + name + "'");
    auto session = factory_(name);
    if (!session) throw Error("backend factory returned nothing for model '" + name + "'");
    return *sessions_.emplace(name, std::move(session)).first->second;
  }

 private:
  const BackendFactory& factory_;
  std::map<std::string, std::unique_ptr<Backend>> sessions_;
};

MetricValue evaluate(const MetricSpec& spec, std::string_view summary, const Document& doc, Backend* backend,
                     const IdfTable* idf) {
  switch (spec.kind) {
    case MetricKind::bertscore: {
      GreedyMatchConfig cfg;
      cfg.use_idf = spec.use_idf;
      return MetricValue::of(bertscore_reffree(summary, doc.text, cfg, *backend, idf));
    }
    case MetricKind::moverscore: {
      GreedyMatchConfig cfg;
      return MetricValue::of(moverscore_greedy(summary, doc.text, cfg, *backend));
    }
    case MetricKind::rouge:
      return MetricValue::of(rouge_reffree(summary, doc.text, spec.variant));
    case MetricKind::sentence_bertscore: {
      SentenceSimConfig cfg;
      cfg.sim_kind = spec.sim_kind;
      cfg.weighting = spec.weighting;
      return MetricValue::of(sentence_bertscore(summary, doc.text, cfg, *backend));
    }
    case MetricKind::external:
      break;
  }
  throw Error("external metrics are not computed per pair");
}

void validate_spec(const MetricSpec& spec) {
  if (!(spec.leadword_k > 0.0 && spec.leadword_k <= 1.0)) {
    throw Error(spec.display_name() + ": leadword ratio must lie in (0, 1]");
  }
  const bool scalar_metric = spec.kind == MetricKind::moverscore || spec.kind == MetricKind::external;
  if (scalar_metric != (spec.component == Component::scalar)) {
    throw Error(spec.display_name() + ": component '" + to_string(spec.component) + "' does not apply to " +
                to_string(spec.kind));
  }
  if (spec.use_idf && spec.kind != MetricKind::bertscore) throw Error(spec.display_name() + ": IDF applies to bertscore only");
  if (spec.kind == MetricKind::external && !spec.external) throw Error(spec.display_name() + ": no external scores loaded");
}

}  // namespace

MetricRun score_metric(const Dataset& dataset, const MetricSpec& spec, const BackendFactory& factory, int workers) {
  validate_spec(spec);
  MetricRun run;
  run.metric_name = spec.display_name();
  run.component = spec.component;
  char digest[20];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(fnv1a64(spec.describe())));
  run.config_digest = digest;

  if (spec.kind == MetricKind::external) {
    run.scores = spec.external->scores;
    return run;
  }

  std::optional<IdfTable> idf;
  if (spec.use_idf) {
    WorkerBackends main_backends(factory);
    idf = dataset_idf(dataset, main_backends.get(spec.model));
  }

  // Documents after Leadword filtering, shared read-only by all workers.
  std::map<std::string, Document> filtered;
  for (const auto& d : dataset.documents) {
    filtered.emplace(d.id, spec.leadword_k == 1.0 ? d : leadword_filter(d, spec.leadword_k));
  }

  const auto& sums = dataset.summaries;
  std::vector<double> values(sums.size(), 0.0);
  std::vector<std::string> errors(sums.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto work = [&]() {
    WorkerBackends backends(factory);
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= sums.size() || failed.load()) return;
      const auto& s = sums[k];
      try {
        Backend* backend = spec.needs_backend() ? &backends.get(spec.model) : nullptr;
        std::vector<Document> docs;
        for (const auto& d : documents_for(dataset, s.doc_id)) docs.push_back(filtered.at(d.id));
        const PairwiseMetric metric = [&](std::string_view summary, const Document& doc) {
          return evaluate(spec, summary, doc, backend, idf ? &*idf : nullptr);
        };
        values[k] = multi_doc_score(docs, s.text, metric, spec.component);
        if (!std::isfinite(values[k])) throw Error("non-finite score");
      } catch (const std::exception& e) {
        errors[k] = e.what();
        failed.store(true);
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(sums.size())));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (std::size_t k = 0; k < sums.size(); ++k) {
    if (!errors[k].empty()) {
      throw Error("metric '" + run.metric_name + "' failed on (" + sums[k].doc_id + ", " + sums[k].system_id +
                  "): " + errors[k]);
    }
  }
  for (std::size_t k = 0; k < sums.size(); ++k) run.scores[{sums[k].doc_id, sums[k].system_id}] = values[k];
  return run;
}

CorrelationReport correlate(const Dataset& dataset, const std::vector<MetricRun>& runs, Pooling pooling) {
  CorrelationReport report;
  report.dataset_name = dataset.name;
  report.pooling = pooling;
  for (const auto& run : runs) {
    for (const auto& aspect : dataset.aspects) {
      const auto sp = summary_level_correlation(dataset, run, aspect, CorrelationKind::spearman, pooling);
      const auto pe = summary_level_correlation(dataset, run, aspect, CorrelationKind::pearson, pooling);
      report.rows.push_back({run.metric_name, run.component, aspect, sp.value, pe.value, sp.n_units});
    }
  }
  return report;
}

CorrelationReport run_benchmark(const Dataset& dataset, const std::vector<MetricSpec>& suite, Pooling pooling,
                                const BackendFactory& factory, int workers) {
  if (suite.empty()) throw Error("benchmark suite is empty");
  std::vector<MetricRun> runs;
  runs.reserve(suite.size());
  for (const auto& spec : suite) runs.push_back(score_metric(dataset, spec, factory, workers));
  return correlate(dataset, runs, pooling);
}

ExternalScores parse_external_scores(std::istream& in, const std::string& origin, const Dataset* dataset) {
  ExternalScores out;
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line() || line.rfind("# metric=", 0) != 0) {
    throw Error(origin + ": first line must be '# metric=<name>'");
  }
  out.run.metric_name = std::string(trim(line.substr(9)));
  if (out.run.metric_name.empty()) throw Error(origin + ": empty metric name");
  out.run.component = Component::scalar;
  if (!next_line() || trim(line) != "doc_id,system_id,score") {
    throw Error(origin + ": line 2: expected header 'doc_id,system_id,score'");
  }
  while (next_line()) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.emplace_back(trim(cell));
    if (cells.size() != 3) {
      throw Error(origin + ": line " + std::to_string(line_no) + ": expected 3 cells, found " + std::to_string(cells.size()));
    }
    double value = 0.0;
    std::size_t used = 0;
    try {
      value = std::stod(cells[2], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cells[2].size() || !std::isfinite(value)) {
      throw Error(origin + ": line " + std::to_string(line_no) + ": score '" + cells[2] + "' is not a number");
    }
    if (!out.run.scores.emplace(SummaryKey{cells[0], cells[1]}, value).second) {
      throw Error(origin + ": line " + std::to_string(line_no) + ": duplicate pair (" + cells[0] + ", " + cells[1] + ")");
    }
  }
  if (dataset) {
    std::set<SummaryKey> known;
    for (const auto& s : dataset->summaries) {
      known.insert({s.doc_id, s.system_id});
      if (!out.run.scores.count({s.doc_id, s.system_id})) {
        out.warnings.push_back(out.run.metric_name + ": no score for (" + s.doc_id + ", " + s.system_id + ")");
      }
    }
    for (const auto& [key, v] : out.run.scores) {
      if (!known.count(key)) {
        out.warnings.push_back(out.run.metric_name + ": score for unknown summary (" + key.first + ", " + key.second + ")");
      }
    }
  }
  out.run.config_digest = "external";
  return out;
}

ExternalScores ingest_external_scores(const std::filesystem::path& path, const Dataset* dataset) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open external scores " + path.string());
  return parse_external_scores(in, path.string(), dataset);
}

namespace {

std::string cell(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

}  // namespace

std::string render_report(const CorrelationReport& report, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::csv) {
    os << "metric,component,aspect,spearman,pearson,n_units\n";
    for (const auto& r : report.rows) {
      os << r.metric << ',' << to_string(r.component) << ',' << r.aspect << ',' << cell(r.spearman) << ','
         << cell(r.pearson) << ',' << r.n_units << '\n';
    }
    return os.str();
  }
  os << "# Correlation report: " << report.dataset_name << "\n\n";
  os << "Summary-level correlation, pooling: " << to_string(report.pooling) << "\n\n";
  os << "| metric | component | aspect | spearman | pearson | n_units |\n";
  os << "|---|---|---|---:|---:|---:|\n";
  for (const auto& r : report.rows) {
    os << "| " << r.metric << " | " << to_string(r.component) << " | " << r.aspect << " | " << cell(r.spearman)
       << " | " << cell(r.pearson) << " | " << r.n_units << " |\n";
  }
  return os.str();
}

}  // namespace docasref
