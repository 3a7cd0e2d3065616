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

#include "edc/refine.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>

#include "edc/parallel.hpp"
#include "edc/schema_define.hpp"

namespace edc::refine {
namespace {

struct Draft {
  std::vector<Triplet> oie_triplets;
  std::map<std::string, std::string> definitions;
  WarningCounters warnings;
  bool failed = false;
};

struct PassContext {
  const PipelineConfig& cfg;
  const Backends& backends;
  canon::CanonConfig canon_cfg;
  canon::CanonicalSchemaState& state;
  const embedding::VectorIndex* retrieval_index = nullptr;
};

Draft draft_base(const Document& doc, const PipelineConfig& cfg, llm::Gateway& llm) {
  Draft d;
  if (cfg.oie.combined_mode) {
    auto combined = oie::extract_with_definitions(doc.text, cfg.oie, llm);
    d.warnings += combined.warnings;
    auto defs = define::complete_definitions(doc.text, combined.triplets,
                                             std::move(combined.definitions),
                                             cfg.oie.few_shot, llm,
                                             combined.needs_backfill ? 1 : 0,
                                             cfg.oie.few_shot_count);
    d.warnings += defs.warnings;
    d.oie_triplets = std::move(combined.triplets);
    d.definitions = std::move(defs.definitions);
    return d;
  }
  auto extraction = oie::extract_triplets(doc.text, cfg.oie, llm);
  d.warnings += extraction.warnings;
  auto defs = define::define_relations(doc.text, extraction.triplets, cfg.oie.few_shot,
                                       llm, cfg.oie.few_shot_count);
  d.warnings += defs.warnings;
  d.oie_triplets = std::move(extraction.triplets);
  d.definitions = std::move(defs.definitions);
  return d;
}

Draft draft_refined(const Document& doc, const ExtractionRecord& prev,
                    const PassContext& ctx) {
  Draft d;
  auto& llm = ctx.backends.llm;
  HintOutcome hint = build_hint(prev, doc.text, ctx.state.schema(), ctx.retrieval_index,
                                ctx.cfg.oie, llm, ctx.backends.retriever,
                                ctx.cfg.retrieval_k);
  d.warnings += hint.warnings;
  auto extraction = oie::extract_refined(doc.text, hint.hint, ctx.cfg.oie, llm);
  d.warnings += extraction.warnings;
  auto defs = define::define_relations(doc.text, extraction.triplets,
                                       ctx.cfg.oie.few_shot, llm,
                                       ctx.cfg.oie.few_shot_count);
  d.warnings += defs.warnings;
  d.oie_triplets = std::move(extraction.triplets);
  d.definitions = std::move(defs.definitions);
  return d;
}

ExtractionRecord downgraded(const Document& doc, int iteration,
                            const ExtractionRecord* prev, WarningCounters warnings) {
  ExtractionRecord r;
  if (prev) r = *prev;
  r.document_id = doc.id;
  r.iteration = iteration;
  ++warnings.backend_failures;
  r.warnings = warnings;
  return r;
}

std::vector<ExtractionRecord> run_pass(std::span<const Document> docs, int iteration,
                                       const std::vector<ExtractionRecord>* prev,
                                       PassContext& ctx) {
  const int jobs = ctx.cfg.jobs;
  std::vector<Draft> drafts(docs.size());

  parallel_for(docs.size(), jobs, [&](std::size_t i) {
    try {
      drafts[i] = prev ? draft_refined(docs[i], (*prev)[i], ctx)
                       : draft_base(docs[i], ctx.cfg, ctx.backends.llm);
    } catch (const TransportError&) {
      drafts[i] = Draft{};
      drafts[i].failed = true;
    }
  });

  std::vector<ExtractionRecord> records(docs.size());
  auto canonicalize_one = [&](std::size_t i) {
    const Document& doc = docs[i];
    const ExtractionRecord* before = prev ? &(*prev)[i] : nullptr;
    Draft& d = drafts[i];
    if (d.failed) {
      records[i] = downgraded(doc, iteration, before, d.warnings);
      return;
    }
    try {
      auto canon = canon::canonicalize_document(
          d.oie_triplets, d.definitions, ctx.state, ctx.canon_cfg, doc.text,
          ctx.backends.llm, ctx.backends.embedder);
      ExtractionRecord r;
      r.document_id = doc.id;
      r.iteration = iteration;
      r.oie_triplets = std::move(d.oie_triplets);
      r.definitions = std::move(d.definitions);
      r.canonical_triplets = std::move(canon.triplets);
      r.actions = std::move(canon.actions);
      r.warnings = d.warnings;
      r.warnings += canon.warnings;
      records[i] = std::move(r);
    } catch (const TransportError&) {
      records[i] = downgraded(doc, iteration, before, d.warnings);
    }
  };

  if (ctx.canon_cfg.mode == canon::CanonMode::SelfCanonicalization) {
    for (std::size_t i = 0; i < docs.size(); ++i) canonicalize_one(i);
  } else {
    parallel_for(docs.size(), jobs, canonicalize_one);
  }
  return records;
}

void validate_docs(std::span<const Document> docs) {
  std::set<std::string> ids;
  for (const auto& d : docs) {
    if (d.id.empty()) throw InvariantError("document with empty id");
    if (!ids.insert(d.id).second) throw InvariantError("duplicate document id: " + d.id);
    if (trim(d.text).empty()) throw InvariantError("document " + d.id + " has empty text");
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (retrieval_k < 1) throw std::invalid_argument("retrieval_k must be >= 1");
  canon.validate();
  oie.validate();
}

HintOutcome build_hint(const ExtractionRecord& prev, std::string_view text,
                       const Schema& schema,
                       const embedding::VectorIndex* retrieval_index,
                       const oie::OieConfig& oie_cfg, llm::Gateway& gateway,
                       embedding::EmbeddingClient& retriever, std::size_t retrieval_k) {
  HintOutcome out;
  auto definition_for = [&](const std::string& name) -> std::optional<std::string> {
    if (auto d = schema.definition_of(name); !d.empty()) return d;
    if (auto it = prev.definitions.find(name); it != prev.definitions.end()) {
      return it->second;
    }
    return std::nullopt;
  };

  for (const auto& t : prev.canonical_triplets) {
    out.hint.add_entity(t.subject);
    out.hint.add_entity(t.object);
  }
  try {
    auto entities = oie::extract_entities(text, oie_cfg, gateway);
    out.warnings += entities.warnings;
    for (const auto& e : entities.entities) out.hint.add_entity(e);
  } catch (const TransportError&) {
    ++out.warnings.backend_failures;
  }

  for (const auto& r : distinct_relations(prev.canonical_triplets)) {
    out.hint.add_relation(r, definition_for(r));
  }
  if (retrieval_index && !retrieval_index->empty()) {
    try {
      for (const auto& hit :
           embedding::retrieve_relations(text, *retrieval_index, retriever, retrieval_k)) {
        out.hint.add_relation(hit.key, definition_for(hit.key));
      }
    } catch (const TransportError&) {
      ++out.warnings.retrieval_failures;
    }
  }
  return out;
}

PipelineResult run_edc(std::span<const Document> docs, const PipelineConfig& cfg,
                       const Backends& backends, const Schema& schema) {
  PipelineConfig base = cfg;
  base.iterations = 0;
  return run_edc_r(docs, base, backends, schema);
}

PipelineResult run_edc_r(std::span<const Document> docs, const PipelineConfig& cfg,
                         const Backends& backends, const Schema& schema) {
  cfg.validate();
  validate_docs(docs);
  const bool self_mode = cfg.mode == canon::CanonMode::SelfCanonicalization;

  canon::CanonicalSchemaState state =
      self_mode ? canon::build_seed_state(schema, backends.embedder)
                : canon::build_target_index(schema, backends.embedder);

  PipelineResult result;
  if (docs.empty()) {
    result.final_schema = state.schema();
    return result;
  }

  canon::CanonConfig canon_cfg = cfg.canon;
  canon_cfg.mode = cfg.mode;
  PassContext ctx{cfg, backends, canon_cfg, state, nullptr};
  std::vector<ExtractionRecord> current = run_pass(docs, 0, nullptr, ctx);
  result.records = current;

  if (cfg.iterations > 0) {
    // From here on the schema is fixed: the target schema, or in self mode
    // the one the base pass just built.
    ctx.canon_cfg.mode = canon::CanonMode::TargetAlignment;
    std::optional<embedding::VectorIndex> retrieval_index;
    if (!state.schema().empty()) {
      retrieval_index = embedding::build_schema_index(
          state.schema(), backends.retriever, embedding::IndexMode::TextRelevance);
      ctx.retrieval_index = &*retrieval_index;
    }
    for (int it = 1; it <= cfg.iterations; ++it) {
      current = run_pass(docs, it, &current, ctx);
      result.records.insert(result.records.end(), current.begin(), current.end());
    }
  }

  for (const auto& r : result.records) result.warnings += r.warnings;
  result.final_schema = state.schema();
  return result;
}

std::vector<ExtractionRecord> final_records(std::span<const ExtractionRecord> records) {
  std::vector<ExtractionRecord> out;
  std::map<std::string, std::size_t> slot;
  for (const auto& r : records) {
    auto [it, inserted] = slot.try_emplace(r.document_id, out.size());
    if (inserted) {
      out.push_back(r);
    } else if (r.iteration >= out[it->second].iteration) {
      out[it->second] = r;
    }
  }
  return out;
}

}  // namespace edc::refine
