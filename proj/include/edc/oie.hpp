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
#include <string>
#include <string_view>
#include <vector>

#include "edc/core_model.hpp"
#include "edc/llm/gateway.hpp"
#include "edc/prompts.hpp"

namespace edc::oie {

struct OieConfig {
  std::filesystem::path few_shot_file;  // provenance only; records are loaded
  std::vector<prompts::FewShotRecord> few_shot;
  std::size_t few_shot_count = llm::kDefaultFewShotCount;
  bool combined_mode = false;
  int max_parse_retries = 1;

  /// Throws std::invalid_argument when no few-shot example is available.
  void validate() const;
};

struct TripletExtraction {
  std::vector<Triplet> triplets;
  WarningCounters warnings;
  std::vector<std::string> messages;
};

struct EntityExtraction {
  std::vector<std::string> entities;
  WarningCounters warnings;
  std::vector<std::string> messages;
};

struct CombinedExtraction {
  std::vector<Triplet> triplets;
  std::map<std::string, std::string> definitions;
  std::vector<std::string> missing_definitions;
  bool needs_backfill = false;
  WarningCounters warnings;
  std::vector<std::string> messages;
};

/// Open extraction with few-shot prompting. A reply that cannot be parsed is
/// re-asked up to cfg.max_parse_retries times, then yields an empty list and
/// an extraction_failures warning.
TripletExtraction extract_triplets(std::string_view text, const OieConfig& cfg,
                                   llm::Gateway& gateway);

EntityExtraction extract_entities(std::string_view text, const OieConfig& cfg,
                                  llm::Gateway& gateway);

/// Extraction with a refinement hint. An empty hint is plain extraction.
/// Returned relations are only those present in the model's reply.
TripletExtraction extract_refined(std::string_view text, const Hint& hint,
                                  const OieConfig& cfg, llm::Gateway& gateway);

/// Extraction and definitions from one prompt. Relations the reply left
/// undefined are listed in missing_definitions with needs_backfill set.
/// Throws std::logic_error unless cfg.combined_mode is on.
CombinedExtraction extract_with_definitions(std::string_view text,
                                            const OieConfig& cfg,
                                            llm::Gateway& gateway);

}  // namespace edc::oie
