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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edc/core_model.hpp"
#include "edc/embedding/client.hpp"
#include "edc/embedding/index.hpp"
#include "edc/llm/gateway.hpp"

namespace edc::canon {

enum class CanonMode { TargetAlignment, SelfCanonicalization };

std::string_view to_string(CanonMode mode);
CanonMode canon_mode_from_string(std::string_view s);

inline constexpr std::size_t kDefaultCandidateK = 5;

struct CanonConfig {
  std::size_t candidate_k = kDefaultCandidateK;
  CanonMode mode = CanonMode::TargetAlignment;
  /// Skip verification when the open relation already names a schema entry.
  bool exact_match_shortcut = true;
  /// Re-asks after an ambiguous multiple-choice answer before treating it as
  /// "none of the above".
  int mcq_retries = 1;

  void validate() const;
};

/// The schema canonical triplets are checked against, with a definition
/// index whose keys always equal the schema's relation names.
class CanonicalSchemaState {
 public:
  CanonicalSchemaState() = default;

  const Schema& schema() const { return schema_; }
  const embedding::VectorIndex& index() const { return index_; }

  /// Appends to both the schema and the index, or to neither.
  void add(std::string_view name, std::string_view definition,
           embedding::EmbeddingVector vec);

  friend bool operator==(const CanonicalSchemaState& a,
                         const CanonicalSchemaState& b) {
    return a.schema_ == b.schema_ && a.index_.keys() == b.index_.keys();
  }

 private:
  Schema schema_;
  embedding::VectorIndex index_{embedding::IndexMode::DefinitionSimilarity};
};

/// Embeds "name: definition" for every relation of a non-empty target schema.
/// Throws InvariantError on an empty schema or a relation without definition.
CanonicalSchemaState build_target_index(const Schema& target,
                                        embedding::EmbeddingClient& embedder);

/// Same as build_target_index but an empty seed is allowed (self mode).
CanonicalSchemaState build_seed_state(const Schema& seed,
                                      embedding::EmbeddingClient& embedder);

struct TripletCanon {
  std::optional<Triplet> triplet;  // absent when dropped
  CanonicalizationAction action;
  WarningCounters warnings;
  int llm_calls = 0;
};

/// Canonicalizes one triplet. In target mode `state` is only read; in self
/// mode a relation with no counterpart is appended to it.
TripletCanon canonicalize_triplet(const Triplet& triplet, std::string_view definition,
                                  CanonicalSchemaState& state, const CanonConfig& cfg,
                                  std::string_view text, llm::Gateway& gateway,
                                  embedding::EmbeddingClient& embedder);

struct DocumentCanon {
  std::vector<Triplet> triplets;
  std::vector<CanonicalizationAction> actions;  // one per input triplet
  WarningCounters warnings;
  int llm_calls = 0;
};

/// Processes triplets strictly in input order. Throws InvariantError if a
/// relation has no definition.
DocumentCanon canonicalize_document(std::span<const Triplet> triplets,
                                    const std::map<std::string, std::string>& definitions,
                                    CanonicalSchemaState& state, const CanonConfig& cfg,
                                    std::string_view text, llm::Gateway& gateway,
                                    embedding::EmbeddingClient& embedder);

}  // namespace edc::canon
