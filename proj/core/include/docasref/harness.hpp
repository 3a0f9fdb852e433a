#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "docasref/backend.hpp"
#include "docasref/lexical_metrics.hpp"
#include "docasref/sentence_metrics.hpp"

namespace docasref {

using SummaryKey = std::pair<std::string, std::string>;  // (doc_id, system_id)

struct MetricRun {
  std::string metric_name;
  Component component = Component::f;
  std::map<SummaryKey, double> scores;
  std::string config_digest;
};

enum class MetricKind { bertscore, moverscore, rouge, sentence_bertscore, external };

/// One entry of a benchmark suite.
struct MetricSpec {
  MetricKind kind = MetricKind::bertscore;
  std::string label;  // report name; derived from the settings when empty
  Component component = Component::f;
  bool use_idf = false;
  RougeVariant variant = RougeVariant::r1;
  SentenceSimKind sim_kind = SentenceSimKind::cosine;
  SentenceWeighting weighting = SentenceWeighting::none;
  double leadword_k = 1.0;
  std::string model;                   // name passed to the BackendFactory
  std::optional<MetricRun> external;   // precomputed scores for MetricKind::external

  std::string display_name() const;
  bool needs_backend() const;
  /// Canonical description of every setting that affects scores.
  std::string describe() const;
};

MetricKind parse_metric_kind(const std::string& name);
const char* to_string(MetricKind kind);

enum class Pooling { per_doc_mean, pooled };
enum class CorrelationKind { spearman, pearson };

Pooling parse_pooling(const std::string& name);
const char* to_string(Pooling pooling);

struct CorrelationRow {
  std::string metric;
  Component component = Component::f;
  std::string aspect;
  std::optional<double> spearman;
  std::optional<double> pearson;
  std::size_t n_units = 0;
};

struct CorrelationReport {
  std::string dataset_name;
  Pooling pooling = Pooling::per_doc_mean;
  std::vector<CorrelationRow> rows;
};

struct CorrelationValue {
  std::optional<double> value;
  std::size_t n_units = 0;
};

/// Correlation unit of a summary: its document's group when set, else the
/// document id.
std::string correlation_unit(const Dataset& dataset, const std::string& doc_id);

/// Documents scored for a summary of `doc_id`: every document of its group,
/// in dataset order, or the document alone.
std::vector<Document> documents_for(const Dataset& dataset, const std::string& doc_id);

/// per_doc_mean: mean over units with at least two rated, scored summaries
/// whose correlation is defined; n_units counts those units. pooled: one
/// correlation over all rated, scored summaries; n_units is their count.
CorrelationValue summary_level_correlation(const Dataset& dataset, const MetricRun& run, const std::string& aspect,
                                           CorrelationKind kind, Pooling pooling);

/// IDF table over the dataset's source documents, tokenized by `backend`.
IdfTable dataset_idf(const Dataset& dataset, Backend& backend);

/// Scores every summary of the dataset. Work is spread over `workers`
/// threads, each with its own backend sessions from `factory`. A failing
/// pair aborts the run with an Error naming the metric, doc id and system id.
MetricRun score_metric(const Dataset& dataset, const MetricSpec& spec, const BackendFactory& factory,
                       int workers = 1);

CorrelationReport correlate(const Dataset& dataset, const std::vector<MetricRun>& runs, Pooling pooling);

CorrelationReport run_benchmark(const Dataset& dataset, const std::vector<MetricSpec>& suite, Pooling pooling,
                                const BackendFactory& factory, int workers = 1);

struct ExternalScores {
  MetricRun run;
  std::vector<std::string> warnings;
};

/// Reads `# metric=<name>` followed by a `doc_id,system_id,score` table.
/// With a dataset, summaries missing from the file and rows naming unknown
/// summaries are reported as warnings.
ExternalScores ingest_external_scores(const std::filesystem::path& path, const Dataset* dataset = nullptr);
ExternalScores parse_external_scores(std::istream& in, const std::string& origin, const Dataset* dataset = nullptr);

enum class ReportFormat { csv, markdown };

ReportFormat parse_report_format(const std::string& name);
std::string render_report(const CorrelationReport& report, ReportFormat format);

}  // namespace docasref
