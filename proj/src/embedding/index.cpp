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

#include "edc/embedding/index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edc::embedding {

EmbeddingVector::EmbeddingVector(std::vector<double> raw)
    : values_(std::move(raw)) {
  if (values_.empty()) throw std::invalid_argument("empty embedding vector");
  double sq = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite embedding value");
    sq += v * v;
  }
  if (sq == 0.0) throw std::invalid_argument("zero embedding vector");
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : values_) v *= inv;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatchError("cosine: dimension " + std::to_string(a.dim()) +
                                 " vs " + std::to_string(b.dim()));
  }
  const auto av = a.values();
  const auto bv = b.values();
  const double dot = std::inner_product(av.begin(), av.end(), bv.begin(), 0.0);
  return std::clamp(dot, -1.0, 1.0);
}

void VectorIndex::add(std::string key, EmbeddingVector vec) {
  if (slot_.contains(key)) {
    throw std::invalid_argument("duplicate index key: " + key);
  }
  if (!keys_.empty() && vec.dim() != dim_) {
    throw DimensionMismatchError("index dimension is " + std::to_string(dim_) +
                                 ", got " + std::to_string(vec.dim()) +
                                 " for key " + key);
  }
  dim_ = vec.dim();
  slot_.emplace(key, keys_.size());
  keys_.push_back(std::move(key));
  vectors_.push_back(std::move(vec));
}

bool VectorIndex::contains(std::string_view key) const {
  return slot_.contains(std::string(key));
}

const EmbeddingVector& VectorIndex::vector_of(std::string_view key) const {
  auto it = slot_.find(std::string(key));
  if (it == slot_.end()) {
    throw std::out_of_range("no index entry for key: " + std::string(key));
  }
  return vectors_[it->second];
}

std::vector<SimilarityHit> top_k(const VectorIndex& index,
                                 const EmbeddingVector& query, std::size_t k) {
  if (index.empty()) throw std::invalid_argument("top_k on an empty index");
  if (k == 0) throw std::invalid_argument("top_k requires k >= 1");

  struct Scored {
    double score;
    std::size_t slot;
  };
  std::vector<Scored> scored;
  scored.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    scored.push_back({cosine(query, index.vectors()[i]), i});
  }
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n),
                    scored.end(), [](const Scored& a, const Scored& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.slot < b.slot;
                    });
  std::vector<SimilarityHit> hits;
  hits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    hits.push_back({index.keys()[scored[i].slot], scored[i].score});
  }
  return hits;
}

}  // namespace edc::embedding
