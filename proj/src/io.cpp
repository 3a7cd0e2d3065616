// Copyright 2026 The edc-kg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "edc/io.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "edc/backend.hpp"

namespace edc::io {
namespace {

std::string describe(const fs::path& path, std::size_t line, const std::string& what) {
  std::string s = path.string();
  if (line > 0) s += ":" + std::to_string(line);
  return s + ": " + what;
}

const json& required(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw std::invalid_argument(std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const json& obj, const char* key) {
  const json& v = required(obj, key);
  if (!v.is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<Triplet> triplets_from_json(const json& arr) {
  if (!arr.is_array()) throw std::invalid_argument("triplets must be an array");
  std::vector<Triplet> out;
  out.reserve(arr.size());
  for (const auto& t : arr) out.push_back(triplet_from_json(t));
  return out;
}

json triplets_to_json(std::span<const Triplet> ts) {
  json arr = json::array();
  for (const auto& t : ts) arr.push_back(triplet_to_json(t));
  return arr;
}

// Calls fn(object, line number) for each non-blank line; wraps any error
// with the file and line.
template <typename Json, typename Fn>
void for_each_jsonl(const fs::path& path, Fn&& fn) {
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      Json j = Json::parse(line);
      if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
      fn(j, n);
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      throw InputError(path, n, e.what());
    }
  }
}

// RFC 4180 style: quoted fields may hold commas, newlines and "" escapes.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field.push_back(c);
      any = true;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

InputError::InputError(const fs::path& path, std::size_t line, const std::string& what)
    : std::runtime_error(describe(path, line, what)), line_(line) {}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& content) {
  write_file_atomic(path, content);
}

json triplet_to_json(const Triplet& t) {
  return json::array({t.subject, t.relation, t.object});
}

Triplet triplet_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument("triplet must be an array of 3 strings, got " + j.dump());
  }
  for (const auto& e : j) {
    if (!e.is_string()) throw std::invalid_argument("triplet elements must be strings: " + j.dump());
  }
  return Triplet::make(j[0].get<std::string>(), j[1].get<std::string>(),
                       j[2].get<std::string>());
}

std::vector<Document> load_dataset(const fs::path& path) {
  std::vector<Document> docs;
  std::set<std::string> ids;
  for_each_jsonl<json>(path, [&](const json& j, std::size_t line) {
    Document d;
    d.id = string_field(j, "id");
    d.text = string_field(j, "text");
    if (d.id.empty()) throw std::invalid_argument("empty document id");
    if (!ids.insert(d.id).second) {
      throw InputError(path, line, "duplicate document id '" + d.id + "'");
    }
    if (auto it = j.find("triplets"); it != j.end() && !it->is_null()) {
      d.reference_triplets = triplets_from_json(*it);
    }
    docs.push_back(std::move(d));
  });
  return docs;
}

void write_dataset(const fs::path& path, std::span<const Document> docs) {
  std::string out;
  for (const auto& d : docs) {
    ordered_json j;
    j["id"] = d.id;
    j["text"] = d.text;
    if (d.reference_triplets) j["triplets"] = triplets_to_json(*d.reference_triplets);
    out += j.dump() + "\n";
  }
  write_text(path, out);
}

Schema load_schema(const fs::path& path) {
  const std::string text = read_text(path);
  Schema schema;
  const std::string head = trim(text);
  if (head.empty()) return schema;

  if (head.front() == '{') {
    ordered_json j;
    try {
      j = ordered_json::parse(text);
    } catch (const std::exception& e) {
      throw InputError(path, 0, e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!it.value().is_string()) {
        throw InputError(path, 0, "definition of '" + it.key() + "' must be a string");
      }
      try {
        schema.add(it.key(), it.value().get<std::string>());
      } catch (const std::exception& e) {
        throw InputError(path, 0, e.what());
      }
    }
    return schema;
  }

  std::vector<std::vector<std::string>> rows;
  try {
    rows = parse_csv(text);
  } catch (const std::exception& e) {
    throw InputError(path, 0, e.what());
  }
  if (rows.empty()) return schema;
  const auto& header = rows.front();
  if (header.size() != 2 || trim(header[0]) != "name" || trim(header[1]) != "definition") {
    throw InputError(path, 1, "CSV schema header must be 'name,definition'");
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2) {
      throw InputError(path, i + 1, "expected 2 columns, got " + std::to_string(rows[i].size()));
    }
    try {
      schema.add(rows[i][0], trim(rows[i][1]));
    } catch (const std::exception& e) {
      throw InputError(path, i + 1, e.what());
    }
  }
  return schema;
}

std::string schema_to_json(const Schema& schema) {
  ordered_json j = ordered_json::object();
  for (const auto& e : schema) j[e.name] = e.definition;
  return j.dump(2) + "\n";
}

void save_schema(const fs::path& path, const Schema& schema) {
  write_text(path, schema_to_json(schema));
}

std::vector<prompts::FewShotRecord> load_few_shot(const fs::path& path) {
  std::vector<prompts::FewShotRecord> out;
  for_each_jsonl<ordered_json>(path, [&](const ordered_json& j, std::size_t) {
    prompts::FewShotRecord r;
    r.text = j.at("text").get<std::string>();
    r.triplets = triplets_from_json(json(j.at("triplets")));
    if (auto it = j.find("entities"); it != j.end()) {
      r.entities = it->get<std::vector<std::string>>();
    }
    if (auto it = j.find("definitions"); it != j.end()) {
      for (auto d = it->begin(); d != it->end(); ++d) {
        r.definitions.emplace_back(d.key(), d.value().get<std::string>());
      }
    }
    out.push_back(std::move(r));
  });
  return out;
}

void write_few_shot(const fs::path& path, std::span<const prompts::FewShotRecord> records) {
  std::string out;
  for (const auto& r : records) {
    ordered_json j;
    j["text"] = r.text;
    j["triplets"] = triplets_to_json(r.triplets);
    if (!r.entities.empty()) j["entities"] = r.entities;
    if (!r.definitions.empty()) {
      ordered_json defs = ordered_json::object();
      for (const auto& [k, v] : r.definitions) defs[k] = v;
      j["definitions"] = defs;
    }
    out += j.dump() + "\n";
  }
  write_text(path, out);
}

ordered_json counters_to_json(const WarningCounters& w) {
  return ordered_json{{"parse_warnings", w.parse_warnings},
                      {"extraction_failures", w.extraction_failures},
                      {"definition_fallbacks", w.definition_fallbacks},
                      {"mcq_ambiguous", w.mcq_ambiguous},
                      {"retrieval_failures", w.retrieval_failures},
                      {"truncated_outputs", w.truncated_outputs},
                      {"backend_failures", w.backend_failures}};
}

WarningCounters counters_from_json(const json& j) {
  WarningCounters w;
  w.parse_warnings = j.value("parse_warnings", 0);
  w.extraction_failures = j.value("extraction_failures", 0);
  w.definition_fallbacks = j.value("definition_fallbacks", 0);
  w.mcq_ambiguous = j.value("mcq_ambiguous", 0);
  w.retrieval_failures = j.value("retrieval_failures", 0);
  w.truncated_outputs = j.value("truncated_outputs", 0);
  w.backend_failures = j.value("backend_failures", 0);
  return w;
}

ordered_json record_to_json(const ExtractionRecord& r) {
  ordered_json j;
  j["id"] = r.document_id;
  j["iteration"] = r.iteration;
  j["oie_triplets"] = triplets_to_json(r.oie_triplets);
  ordered_json defs = ordered_json::object();
  for (const auto& [k, v] : r.definitions) defs[k] = v;
  j["definitions"] = defs;
  j["canonical_triplets"] = triplets_to_json(r.canonical_triplets);
  ordered_json actions = ordered_json::array();
  for (const auto& a : r.actions) {
    ordered_json aj;
    aj["kind"] = std::string(to_string(a.kind));
    aj["source"] = a.source_relation;
    aj["target"] = a.target_relation ? ordered_json(*a.target_relation) : ordered_json();
    actions.push_back(aj);
  }
  j["actions"] = actions;
  j["warnings"] = counters_to_json(r.warnings);
  return j;
}

ExtractionRecord record_from_json(const json& j) {
  ExtractionRecord r;
  r.document_id = string_field(j, "id");
  r.iteration = required(j, "iteration").get<int>();
  r.oie_triplets = triplets_from_json(required(j, "oie_triplets"));
  for (const auto& [k, v] : required(j, "definitions").items()) {
    r.definitions[k] = v.get<std::string>();
  }
  r.canonical_triplets = triplets_from_json(required(j, "canonical_triplets"));
  for (const auto& a : required(j, "actions")) {
    CanonicalizationAction act{action_kind_from_string(a.at("kind").get<std::string>()),
                               a.at("source").get<std::string>(), std::nullopt};
    if (auto t = a.find("target"); t != a.end() && !t->is_null()) {
      act.target_relation = t->get<std::string>();
    }
    r.actions.push_back(std::move(act));
  }
  if (auto w = j.find("warnings"); w != j.end()) r.warnings = counters_from_json(*w);
  return r;
}

std::string results_to_jsonl(std::span<const ExtractionRecord> records) {
  std::string out;
  for (const auto& r : records) out += record_to_json(r).dump() + "\n";
  return out;
}

void write_results(const fs::path& path, std::span<const ExtractionRecord> records) {
  write_text(path, results_to_jsonl(records));
}

std::vector<ExtractionRecord> load_results(const fs::path& path) {
  std::vector<ExtractionRecord> out;
  for_each_jsonl<json>(path, [&](const json& j, std::size_t) {
    out.push_back(record_from_json(j));
  });
  return out;
}

std::vector<OpenDocument> load_open_triplets(const fs::path& path) {
  std::vector<OpenDocument> out;
  std::set<std::string> ids;
  for_each_jsonl<json>(path, [&](const json& j, std::size_t line) {
    OpenDocument d;
    d.id = string_field(j, "id");
    d.text = string_field(j, "text");
    if (!ids.insert(d.id).second) {
      throw InputError(path, line, "duplicate document id '" + d.id + "'");
    }
    d.triplets = triplets_from_json(required(j, "triplets"));
    if (auto it = j.find("definitions"); it != j.end()) {
      for (const auto& [k, v] : it->items()) d.definitions[k] = v.get<std::string>();
    }
    out.push_back(std::move(d));
  });
  return out;
}

ordered_json manifest_to_json(const RunManifest& m) {
  ordered_json j;
  j["config"] = m.config;
  ordered_json backends = ordered_json::object();
  for (const auto& [k, v] : m.backends) backends[k] = v;
  j["backends"] = backends;
  j["fixture_digests"] = m.fixture_digests;
  j["started_at"] = m.started_at ? ordered_json(*m.started_at) : ordered_json();
  j["finished_at"] = m.finished_at ? ordered_json(*m.finished_at) : ordered_json();
  j["warnings"] = counters_to_json(m.warnings);
  return j;
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.config = ordered_json::parse(required(j, "config").dump());
  for (const auto& [k, v] : required(j, "backends").items()) {
    m.backends[k] = v.get<std::string>();
  }
  m.fixture_digests = required(j, "fixture_digests").get<std::vector<std::string>>();
  if (const auto& s = required(j, "started_at"); !s.is_null()) m.started_at = s.get<std::string>();
  if (const auto& f = required(j, "finished_at"); !f.is_null()) m.finished_at = f.get<std::string>();
  m.warnings = counters_from_json(required(j, "warnings"));
  return m;
}

ordered_json report_to_json(const eval::EvalReport& report) {
  ordered_json j;
  ordered_json crit = ordered_json::object();
  for (auto c : eval::kAllCriteria) {
    auto it = report.criteria.find(c);
    if (it == report.criteria.end()) continue;
    crit[std::string(eval::to_string(c))] = {
        {"p", it->second.precision}, {"r", it->second.recall}, {"f1", it->second.f1}};
  }
  j["criteria"] = crit;
  j["schema_size"] = report.schema_size ? ordered_json(*report.schema_size) : ordered_json();
  j["redundancy"] = report.redundancy ? ordered_json(*report.redundancy) : ordered_json();
  j["avg_triplets_per_sentence"] = report.avg_triplets_per_sentence;
  ordered_json w = counters_to_json(report.counters);
  w["messages"] = report.warnings;
  j["warnings"] = w;
  return j;
}

std::string format_report(const eval::EvalReport& report) {
  std::string out = "criterion  precision  recall  f1\n";
  for (auto c : eval::kAllCriteria) {
    auto it = report.criteria.find(c);
    if (it == report.criteria.end()) continue;
    std::string name(eval::to_string(c));
    name.resize(9, ' ');
    out += name + "  " + fmt3(it->second.precision) + "      " + fmt3(it->second.recall) +
           "   " + fmt3(it->second.f1) + "\n";
  }
  if (report.schema_size) out += "schema_size: " + std::to_string(*report.schema_size) + "\n";
  if (report.redundancy) out += "redundancy: " + fmt3(*report.redundancy) + "\n";
  out += "avg_triplets_per_sentence: " + fmt3(report.avg_triplets_per_sentence) + "\n";
  for (const auto& w : report.warnings) out += "warning: " + w + "\n";
  return out;
}

std::map<std::string, std::string> load_config(const fs::path& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(path, n, "expected key=value");
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw InputError(path, n, "empty key");
    out[key] = trim(std::string_view(line).substr(eq + 1));
  }
  return out;
}

}  // namespace edc::io
