#include "docasref/dataset.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "docasref/text.hpp"
#include "json.hpp"

namespace docasref {
namespace {

using nlohmann::json;

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw DatasetError("line " + std::to_string(line) + ": " + what);
}

std::string required_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) fail(line, std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

}  // namespace

Dataset parse_dataset(std::istream& in) {
  Dataset ds;
  bool have_meta = false;
  std::set<std::string> aspect_set;
  std::set<std::string> doc_ids;
  std::set<std::pair<std::string, std::string>> keys;
  std::vector<std::size_t> summary_lines;

  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (trim(raw).empty()) continue;

    json obj;
    try {
      obj = json::parse(raw);
    } catch (const json::parse_error& e) {
      fail(line, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) fail(line, "expected a JSON object");
    const auto kind = required_string(obj, "kind", line);

    if (kind == "meta") {
      if (have_meta) fail(line, "duplicate meta line");
      have_meta = true;
      ds.name = required_string(obj, "name", line);
      auto it = obj.find("aspects");
      if (it == obj.end() || !it->is_array()) fail(line, "meta line needs an 'aspects' array");
      for (const auto& a : *it) {
        if (!a.is_string()) fail(line, "aspect names must be strings");
        if (!aspect_set.insert(a.get<std::string>()).second) fail(line, "duplicate aspect " + a.dump());
        ds.aspects.push_back(a.get<std::string>());
      }
    } else if (kind == "doc") {
      Document doc;
      doc.id = required_string(obj, "id", line);
      doc.text = required_string(obj, "text", line);
      if (trim(doc.text).empty()) fail(line, "document '" + doc.id + "' has empty text");
      if (auto it = obj.find("group"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) fail(line, "'group' must be a string or null");
        doc.doc_group = it->get<std::string>();
      }
      if (!doc_ids.insert(doc.id).second) fail(line, "duplicate document id '" + doc.id + "'");
      ds.documents.push_back(std::move(doc));
    } else if (kind == "sum") {
      if (!have_meta) fail(line, "summary line before the meta header");
      SummaryRecord rec;
      rec.doc_id = required_string(obj, "doc_id", line);
      rec.system_id = required_string(obj, "system_id", line);
      rec.text = required_string(obj, "text", line);
      auto it = obj.find("ratings");
      if (it == obj.end() || !it->is_object()) fail(line, "missing 'ratings' object");
      for (const auto& [aspect, value] : it->items()) {
        if (!aspect_set.count(aspect)) fail(line, "unknown aspect '" + aspect + "'");
        if (!value.is_number()) fail(line, "rating for '" + aspect + "' is not a number");
        const double v = value.get<double>();
        if (!std::isfinite(v)) fail(line, "rating for '" + aspect + "' is not finite");
        rec.ratings.emplace(aspect, v);
      }
      if (!keys.emplace(rec.doc_id, rec.system_id).second) {
        fail(line, "duplicate summary key (" + rec.doc_id + ", " + rec.system_id + ")");
      }
      summary_lines.push_back(line);
      ds.summaries.push_back(std::move(rec));
    } else {
      fail(line, "unknown kind '" + kind + "'");
    }
  }
  if (!have_meta) throw DatasetError("dataset has no meta line");
  for (std::size_t i = 0; i < ds.summaries.size(); ++i) {
    if (!doc_ids.count(ds.summaries[i].doc_id)) {
      fail(summary_lines[i], "summary references unknown document '" + ds.summaries[i].doc_id + "'");
    }
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset " + path.string());
  return parse_dataset(in);
}

void save_dataset(const Dataset& ds, std::ostream& out) {
  out << json{{"kind", "meta"}, {"name", ds.name}, {"aspects", ds.aspects}}.dump() << '\n';
  for (const auto& d : ds.documents) {
    json obj{{"kind", "doc"}, {"id", d.id}, {"text", d.text}};
    obj["group"] = d.doc_group ? json(*d.doc_group) : json(nullptr);
    out << obj.dump() << '\n';
  }
  for (const auto& s : ds.summaries) {
    json ratings = json::object();
    for (const auto& [k, v] : s.ratings) ratings[k] = v;
    out << json{{"kind", "sum"},
                {"doc_id", s.doc_id},
                {"system_id", s.system_id},
                {"text", s.text},
                {"ratings", ratings}}
               .dump()
        << '\n';
  }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write dataset " + path.string());
  save_dataset(ds, out);
}

}  // namespace docasref
