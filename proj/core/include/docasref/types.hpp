#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace docasref {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Document {
  std::string id;
  std::string text;
  std::optional<std::string> doc_group;
};

struct SummaryRecord {
  std::string doc_id;
  std::string system_id;
  std::string text;
  std::map<std::string, double> ratings;
};

struct Dataset {
  std::string name;
  std::vector<Document> documents;
  std::vector<SummaryRecord> summaries;
  std::vector<std::string> aspects;

  const Document* find_document(const std::string& id) const;
};

/// Precision / recall / F1 of a pairwise metric.
struct ScoreTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  /// Builds a triple with f1 = 2PR/(P+R), or 0 when P+R <= 0.
  static ScoreTriple from_pr(double precision, double recall);
};

double harmonic_f1(double precision, double recall);

/// Which number of a metric's output is correlated: one side of a
/// ScoreTriple, or the single value of a scalar metric.
enum class Component { p, r, f, scalar };

Component parse_component(const std::string& name);
const char* to_string(Component component);

/// Output of one metric on one (summary, document) pair.
struct MetricValue {
  ScoreTriple triple;
  std::optional<double> scalar;

  static MetricValue of(const ScoreTriple& t) { return {t, std::nullopt}; }
  static MetricValue of(double v) { return {{}, v}; }

  /// Throws Error when asking a scalar metric for p/r/f or a triple metric
  /// for its scalar.
  double component(Component c) const;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

}  // namespace docasref
