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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edc/core_model.hpp"
#include "edc/embedding/client.hpp"
#include "edc/embedding/index.hpp"

namespace edc::embedding {

inline constexpr std::size_t kDefaultRetrievalK = 10;

/// Text that represents a relation inside an index: "name: definition", or
/// the bare name when no definition is known.
std::string relation_entry_text(std::string_view name, std::string_view definition);

/// Embeds every schema relation (no instruction) into a fresh index keyed by
/// relation name, in schema order.
VectorIndex build_schema_index(const Schema& schema, EmbeddingClient& client,
                               IndexMode mode);

/// Top-k schema relations for `text`, whose query side is wrapped in the
/// retrieval instruction. Throws std::invalid_argument on an empty index.
std::vector<SimilarityHit> retrieve_relations(
    std::string_view text, const VectorIndex& schema_index, EmbeddingClient& client,
    std::size_t k = kDefaultRetrievalK,
    const RetrievalInstruction& instruction = RetrievalInstruction());

/// Contrastive loss with the similarity used directly as the score:
/// -log(pos / (pos + sum(max(neg, 0)))). Throws std::domain_error when
/// positive_sim <= 0 or any value is non-finite.
double info_nce_loss(double positive_sim, std::span<const double> negative_sims);

/// Thrown when a gold relation is absent from the retrieval index.
class SchemaMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RecallQuery {
  EmbeddingVector query;
  std::vector<std::string> gold;
};

/// Mean over queries of |gold ∩ top-k| / |gold|, on pre-embedded queries.
double recall_at_k(std::span<const RecallQuery> queries, const VectorIndex& index,
                   std::size_t k);

struct RecallPair {
  std::string text;
  std::vector<std::string> gold;
};

/// Embeds each text with the retrieval instruction, then as above.
double recall_at_k(std::span<const RecallPair> pairs, const VectorIndex& index,
                   EmbeddingClient& client, std::size_t k,
                   const RetrievalInstruction& instruction = RetrievalInstruction());

}  // namespace edc::embedding
