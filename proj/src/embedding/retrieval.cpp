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

#include "edc/embedding/retrieval.hpp"

#include <cmath>
#include <set>

namespace edc::embedding {

std::string relation_entry_text(std::string_view name, std::string_view definition) {
  if (trim(definition).empty()) return std::string(name);
  return std::string(name) + ": " + std::string(definition);
}

VectorIndex build_schema_index(const Schema& schema, EmbeddingClient& client,
                               IndexMode mode) {
  VectorIndex index(mode);
  if (schema.empty()) return index;
  std::vector<std::string> texts;
  texts.reserve(schema.size());
  for (const auto& e : schema) texts.push_back(relation_entry_text(e.name, e.definition));
  auto vectors = client.embed(texts);
  for (std::size_t i = 0; i < schema.size(); ++i) {
    index.add(schema.entries()[i].name, std::move(vectors[i]));
  }
  return index;
}

std::vector<SimilarityHit> retrieve_relations(std::string_view text,
                                              const VectorIndex& schema_index,
                                              EmbeddingClient& client, std::size_t k,
                                              const RetrievalInstruction& instruction) {
  if (schema_index.empty()) {
    throw std::invalid_argument("retrieve_relations: empty schema index");
  }
  return top_k(schema_index, client.embed_one(text, instruction), k);
}

double info_nce_loss(double positive_sim, std::span<const double> negative_sims) {
  if (!std::isfinite(positive_sim) || positive_sim <= 0.0) {
    throw std::domain_error("info_nce_loss: positive similarity must be > 0");
  }
  double denom = positive_sim;
  for (double n : negative_sims) {
    if (!std::isfinite(n)) throw std::domain_error("info_nce_loss: non-finite negative");
    denom += std::max(n, 0.0);
  }
  return -std::log(positive_sim / denom);
}

double recall_at_k(std::span<const RecallQuery> queries, const VectorIndex& index,
                   std::size_t k) {
  if (queries.empty()) throw std::invalid_argument("recall_at_k: no queries");
  double total = 0.0;
  for (const auto& q : queries) {
    const std::set<std::string> gold(q.gold.begin(), q.gold.end());
    if (gold.empty()) throw std::invalid_argument("recall_at_k: empty gold set");
    for (const auto& g : gold) {
      if (!index.contains(g)) {
        throw SchemaMismatchError("gold relation not in schema index: " + g);
      }
    }
    std::size_t found = 0;
    for (const auto& hit : top_k(index, q.query, k)) found += gold.count(hit.key);
    total += static_cast<double>(found) / static_cast<double>(gold.size());
  }
  return total / static_cast<double>(queries.size());
}

double recall_at_k(std::span<const RecallPair> pairs, const VectorIndex& index,
                   EmbeddingClient& client, std::size_t k,
                   const RetrievalInstruction& instruction) {
  if (pairs.empty()) throw std::invalid_argument("recall_at_k: no pairs");
  std::vector<std::string> texts;
  texts.reserve(pairs.size());
  for (const auto& p : pairs) texts.push_back(p.text);
  auto vectors = client.embed(texts, instruction);
  std::vector<RecallQuery> queries;
  queries.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    queries.push_back({std::move(vectors[i]), pairs[i].gold});
  }
  return recall_at_k(queries, index, k);
}

}  // namespace edc::embedding
