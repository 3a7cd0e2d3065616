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

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edc/core_model.hpp"
#include "edc/evaluate.hpp"
#include "edc/prompts.hpp"

// File formats: line-delimited JSON for datasets, results and few-shot
// examples; JSON map or two-column CSV for schemas; key=value config files.

namespace edc::io {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Unreadable or malformed input. `line` is 1-based, 0 when not line-bound.
class InputError : public std::runtime_error {
 public:
  InputError(const fs::path& path, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string read_text(const fs::path& path);

/// {"id", "text", "triplets"?}; triplets are [s, r, o] string arrays.
std::vector<Document> load_dataset(const fs::path& path);
void write_dataset(const fs::path& path, std::span<const Document> docs);

/// A JSON object {name: definition} or CSV with header "name,definition".
/// An empty file is an empty schema.
Schema load_schema(const fs::path& path);
/// Writes the JSON map form, entries in schema order.
void save_schema(const fs::path& path, const Schema& schema);
std::string schema_to_json(const Schema& schema);

/// {"text", "triplets", "entities"?, "definitions"?} per line; definitions
/// is a {relation: definition} object.
std::vector<prompts::FewShotRecord> load_few_shot(const fs::path& path);
void write_few_shot(const fs::path& path, std::span<const prompts::FewShotRecord> records);

json triplet_to_json(const Triplet& t);
Triplet triplet_from_json(const json& j);
ordered_json record_to_json(const ExtractionRecord& r);
ExtractionRecord record_from_json(const json& j);
ordered_json counters_to_json(const WarningCounters& w);
WarningCounters counters_from_json(const json& j);

/// One compact JSON record per line, in the given order.
std::string results_to_jsonl(std::span<const ExtractionRecord> records);
void write_results(const fs::path& path, std::span<const ExtractionRecord> records);
std::vector<ExtractionRecord> load_results(const fs::path& path);

/// Open triplets for canonicalization only: {"id", "text", "triplets",
/// "definitions"?}.
struct OpenDocument {
  std::string id;
  std::string text;
  std::vector<Triplet> triplets;
  std::map<std::string, std::string> definitions;
};
std::vector<OpenDocument> load_open_triplets(const fs::path& path);

struct RunManifest {
  ordered_json config = ordered_json::object();
  std::map<std::string, std::string> backends;
  std::vector<std::string> fixture_digests;  // sorted; replay runs only
  std::optional<std::string> started_at;
  std::optional<std::string> finished_at;
  WarningCounters warnings;
};
ordered_json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const json& j);

ordered_json report_to_json(const eval::EvalReport& report);
/// Fixed three-decimal table.
std::string format_report(const eval::EvalReport& report);

/// key=value lines; '#' starts a comment; blank lines ignored.
std::map<std::string, std::string> load_config(const fs::path& path);

/// Writes via a temporary file and rename.
void write_text(const fs::path& path, const std::string& content);

}  // namespace edc::io
