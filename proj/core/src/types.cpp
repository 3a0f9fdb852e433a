#include "docasref/types.hpp"

namespace docasref {

const Document* Dataset::find_document(const std::string& id) const {
  for (const auto& d : documents) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

double harmonic_f1(double precision, double recall) {
  const double denom = precision + recall;
  if (!(denom > 0.0)) return 0.0;
  return 2.0 * precision * recall / denom;
}

ScoreTriple ScoreTriple::from_pr(double precision, double recall) {
  return {precision, recall, harmonic_f1(precision, recall)};
}

Component parse_component(const std::string& name) {
  if (name == "p" || name == "precision") return Component::p;
  if (name == "r" || name == "recall") return Component::r;
  if (name == "f" || name == "f1") return Component::f;
  if (name == "scalar") return Component::scalar;
  throw Error("unknown component '" + name + "' (expected p, r, f or scalar)");
}

const char* to_string(Component component) {
  switch (component) {
    case Component::p: return "p";
    case Component::r: return "r";
    case Component::f: return "f";
    case Component::scalar: return "scalar";
  }
  return "?";
}

double MetricValue::component(Component c) const {
  if (c == Component::scalar) {
    if (!scalar) throw Error("metric has no scalar value; choose p, r or f");
    return *scalar;
  }
  if (scalar) throw Error("scalar metric has no p/r/f components");
  switch (c) {
    case Component::p: return triple.precision;
    case Component::r: return triple.recall;
    default: return triple.f1;
  }
}

}  // namespace docasref
