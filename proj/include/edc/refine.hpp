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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edc/canonicalize.hpp"
#include "edc/core_model.hpp"
#include "edc/embedding/client.hpp"
#include "edc/embedding/index.hpp"
#include "edc/embedding/retrieval.hpp"
#include "edc/llm/gateway.hpp"
#include "edc/oie.hpp"

// Pipeline orchestration: the extract -> define -> canonicalize pass and the
// hint-driven refinement rounds that follow it.
//
// Documents are processed in two barriers per pass. Extraction and
// definition run concurrently across documents; canonicalization runs
// concurrently in target mode and strictly in document order in self mode,
// where each Added relation becomes a candidate for later triplets. Hints for
// round i only read state produced by the completed round i-1.

namespace edc::refine {

struct PipelineConfig {
  canon::CanonMode mode = canon::CanonMode::TargetAlignment;
  int iterations = 1;  // refinement rounds after the base pass
  std::size_t retrieval_k = embedding::kDefaultRetrievalK;
  canon::CanonConfig canon;
  oie::OieConfig oie;
  int jobs = 1;

  void validate() const;
};

struct Backends {
  llm::Gateway& llm;
  embedding::EmbeddingClient& embedder;   // definition similarity
  embedding::EmbeddingClient& retriever;  // text-to-relation relevance
};

struct HintOutcome {
  Hint hint;
  WarningCounters warnings;
};

/// Candidate entities: previous canonical subjects/objects, then entities
/// the model extracts from the text. Candidate relations: previous canonical
/// relations, then the top `retrieval_k` relations of `retrieval_index`.
/// Definitions come from `schema`, else from the previous record. Transport
/// failures while extracting entities or retrieving degrade to the
/// previous-round items with a warning.
HintOutcome build_hint(const ExtractionRecord& prev, std::string_view text,
                       const Schema& schema,
                       const embedding::VectorIndex* retrieval_index,
                       const oie::OieConfig& oie_cfg, llm::Gateway& gateway,
                       embedding::EmbeddingClient& retriever, std::size_t retrieval_k);

struct PipelineResult {
  std::vector<ExtractionRecord> records;  // iteration-major, document order
  Schema final_schema;
  WarningCounters warnings;
};

/// Base pass only. In target mode `schema` is the target schema; in self
/// mode it seeds the canonical schema and may be empty.
PipelineResult run_edc(std::span<const Document> docs, const PipelineConfig& cfg,
                       const Backends& backends, const Schema& schema = {});

/// Base pass plus cfg.iterations refinement rounds. In self mode the schema
/// built by the base pass becomes the fixed target for every later round.
PipelineResult run_edc_r(std::span<const Document> docs, const PipelineConfig& cfg,
                         const Backends& backends, const Schema& schema = {});

/// The last-iteration record of each document, in first-seen order.
std::vector<ExtractionRecord> final_records(std::span<const ExtractionRecord> records);

}  // namespace edc::refine
