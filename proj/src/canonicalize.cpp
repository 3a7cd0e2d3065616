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

#include "edc/canonicalize.hpp"

#include <stdexcept>

#include "edc/embedding/retrieval.hpp"
#include "edc/llm/parse.hpp"
#include "edc/prompts.hpp"

namespace edc::canon {

std::string_view to_string(CanonMode mode) {
  return mode == CanonMode::TargetAlignment ? "target" : "self";
}

CanonMode canon_mode_from_string(std::string_view s) {
  if (s == "target" || s == "target_alignment") return CanonMode::TargetAlignment;
  if (s == "self" || s == "self_canonicalization") {
    return CanonMode::SelfCanonicalization;
  }
  throw std::invalid_argument("unknown canonicalization mode: " + std::string(s));
}

void CanonConfig::validate() const {
  if (candidate_k < 1) throw std::invalid_argument("candidate_k must be >= 1");
  if (mcq_retries < 0) throw std::invalid_argument("mcq_retries must be >= 0");
}

void CanonicalSchemaState::add(std::string_view name, std::string_view definition,
                               embedding::EmbeddingVector vec) {
  const std::string n = normalize_relation(name);
  if (schema_.contains(n)) throw InvariantError("duplicate schema relation: " + n);
  if (trim(definition).empty()) throw InvariantError("empty definition for " + n);
  if (!index_.empty() && vec.dim() != index_.dim()) {
    throw embedding::DimensionMismatchError("relation vector dimension mismatch for " + n);
  }
  index_.add(n, std::move(vec));
  schema_.add(n, definition);
}

CanonicalSchemaState build_seed_state(const Schema& seed,
                                      embedding::EmbeddingClient& embedder) {
  for (const auto& e : seed) {
    if (trim(e.definition).empty()) {
      throw InvariantError("schema relation '" + e.name + "' has no definition");
    }
  }
  CanonicalSchemaState state;
  if (seed.empty()) return state;
  auto index = embedding::build_schema_index(
      seed, embedder, embedding::IndexMode::DefinitionSimilarity);
  for (std::size_t i = 0; i < seed.size(); ++i) {
    const auto& e = seed.entries()[i];
    state.add(e.name, e.definition, index.vectors()[i]);
  }
  return state;
}

CanonicalSchemaState build_target_index(const Schema& target,
                                        embedding::EmbeddingClient& embedder) {
  if (target.empty()) {
    throw InvariantError("target alignment requires a non-empty target schema");
  }
  return build_seed_state(target, embedder);
}

TripletCanon canonicalize_triplet(const Triplet& triplet, std::string_view definition,
                                  CanonicalSchemaState& state, const CanonConfig& cfg,
                                  std::string_view text, llm::Gateway& gateway,
                                  embedding::EmbeddingClient& embedder) {
  if (trim(definition).empty()) {
    throw InvariantError("no definition supplied for relation '" + triplet.relation + "'");
  }
  const bool self_mode = cfg.mode == CanonMode::SelfCanonicalization;
  const std::string& rel = triplet.relation;

  if (cfg.exact_match_shortcut && state.schema().contains(rel)) {
    return {triplet, CanonicalizationAction::aligned(rel, rel), {}, 0};
  }
  if (self_mode && state.schema().empty()) {
    state.add(rel, definition,
              embedder.embed_one(embedding::relation_entry_text(rel, definition)));
    return {triplet, CanonicalizationAction::added(rel), {}, 0};
  }

  const auto query = embedder.embed_one(embedding::relation_entry_text(rel, definition));
  const auto hits = embedding::top_k(state.index(), query, cfg.candidate_k);
  std::vector<RelationDefinition> choices;
  choices.reserve(hits.size());
  for (const auto& h : hits) choices.push_back(*state.schema().find(h.key));

  TripletCanon out{std::nullopt, CanonicalizationAction::dropped(rel), {}, 0};
  const std::string prompt =
      prompts::canonicalization_prompt(text, triplet, definition, choices);
  std::optional<std::size_t> choice;
  bool answered = false;
  for (int attempt = 0; attempt <= cfg.mcq_retries && !answered; ++attempt) {
    const auto reply = gateway.complete_prompt(
        attempt == 0 ? prompt : prompt + std::string(prompts::kMcqReask));
    ++out.llm_calls;
    if (reply.truncated) ++out.warnings.truncated_outputs;
    try {
      choice = llm::parse_mcq_answer(reply.text, choices.size());
      answered = true;
    } catch (const llm::AmbiguousMcqError&) {
      ++out.warnings.mcq_ambiguous;
    }
  }

  if (answered && choice) {
    const std::string& target = choices[*choice].name;
    out.triplet = triplet.with_relation(target);
    out.action = CanonicalizationAction::aligned(rel, target);
    return out;
  }
  if (!self_mode) return out;  // dropped

  if (state.schema().contains(rel)) {
    out.triplet = triplet;
    out.action = CanonicalizationAction::aligned(rel, rel);
    return out;
  }
  state.add(rel, definition, query);
  out.triplet = triplet;
  out.action = CanonicalizationAction::added(rel);
  return out;
}

DocumentCanon canonicalize_document(std::span<const Triplet> triplets,
                                    const std::map<std::string, std::string>& definitions,
                                    CanonicalSchemaState& state, const CanonConfig& cfg,
                                    std::string_view text, llm::Gateway& gateway,
                                    embedding::EmbeddingClient& embedder) {
  cfg.validate();
  DocumentCanon out;
  for (const auto& t : triplets) {
    auto def = definitions.find(t.relation);
    if (def == definitions.end()) {
      throw InvariantError("no definition for relation '" + t.relation + "'");
    }
    TripletCanon tc =
        canonicalize_triplet(t, def->second, state, cfg, text, gateway, embedder);
    if (tc.triplet) out.triplets.push_back(std::move(*tc.triplet));
    out.actions.push_back(std::move(tc.action));
    out.warnings += tc.warnings;
    out.llm_calls += tc.llm_calls;
  }
  return out;
}

}  // namespace edc::canon
