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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace edc::embedding {

class DimensionMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unit-L2 vector. Construction normalizes; a zero or non-finite input is
/// rejected.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> raw);

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const EmbeddingVector&,
                         const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

/// Dot product of two unit vectors, clamped to [-1, 1].
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

enum class IndexMode { DefinitionSimilarity, TextRelevance };

struct SimilarityHit {
  std::string key;
  double score = 0.0;
};

/// Brute-force cosine index. Keys are unique and keep insertion order, which
/// breaks score ties in top_k.
class VectorIndex {
 public:
  explicit VectorIndex(IndexMode mode = IndexMode::DefinitionSimilarity)
      : mode_(mode) {}

  /// Throws std::invalid_argument on a duplicate key and
  /// DimensionMismatchError when `vec` disagrees with existing entries.
  void add(std::string key, EmbeddingVector vec);

  bool contains(std::string_view key) const;
  const EmbeddingVector& vector_of(std::string_view key) const;

  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  std::size_t dim() const { return dim_; }
  IndexMode mode() const { return mode_; }
  const std::vector<std::string>& keys() const { return keys_; }
  const std::vector<EmbeddingVector>& vectors() const { return vectors_; }

 private:
  IndexMode mode_;
  std::size_t dim_ = 0;
  std::vector<std::string> keys_;
  std::vector<EmbeddingVector> vectors_;
  std::unordered_map<std::string, std::size_t> slot_;
};

/// The min(k, |index|) most similar entries, by descending score, earlier
/// insertion first on ties. Throws std::invalid_argument on an empty index
/// or k == 0.
std::vector<SimilarityHit> top_k(const VectorIndex& index,
                                 const EmbeddingVector& query, std::size_t k);

}  // namespace edc::embedding
