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

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edc/core_model.hpp"
#include "edc/embedding/index.hpp"

// Token-level triplet scoring.
//
// Elements are compared as token sequences. Triplets are paired one-to-one
// by an optimal assignment over per-pair scores, so results do not depend on
// the order candidates or references are listed in.

namespace edc::eval {

enum class MatchCriterion { Exact, Partial, Strict };

std::string_view to_string(MatchCriterion c);
MatchCriterion criterion_from_string(std::string_view s);
inline constexpr std::array<MatchCriterion, 3> kAllCriteria = {
    MatchCriterion::Exact, MatchCriterion::Partial, MatchCriterion::Strict};

enum class ElementJudgment { Correct, PartialMatch, Incorrect, Missed, Spurious };

std::string_view to_string(ElementJudgment j);

/// Splits camelCase and underscores, lowercases, splits on whitespace and
/// strips punctuation from both ends of every token. Empty tokens are dropped.
std::vector<std::string> tokenize_element(std::string_view element);

/// Correct when token sequences are equal, PartialMatch when they share a
/// token, Incorrect otherwise.
ElementJudgment judge_elements(std::string_view candidate, std::string_view reference);

/// Best element score of one candidate/reference triplet pair. Strict compares
/// slot by slot; Exact and Partial may match any candidate slot to any
/// reference slot, each used once.
double triplet_pair_score(const Triplet& candidate, const Triplet& reference,
                          MatchCriterion criterion);

struct DocumentScore {
  double weighted_correct = 0.0;
  int n_candidate_elems = 0;
  int n_reference_elems = 0;
  std::map<ElementJudgment, int> judgments;
  /// (candidate index, reference index) of every aligned pair.
  std::vector<std::pair<std::size_t, std::size_t>> alignment;
};

DocumentScore score_document(std::span<const Triplet> candidates,
                             std::span<const Triplet> references,
                             MatchCriterion criterion);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Aggregate {
  Prf prf;
  std::vector<std::string> warnings;
};

/// Micro-averaged over documents. Zero denominators give 0 and a warning.
Aggregate aggregate(std::span<const DocumentScore> scores);

/// Mean over entries of the cosine to the nearest other entry; 0 when the
/// index has at most one entry.
double redundancy_score(const embedding::VectorIndex& index);

struct SchemaStats {
  std::size_t schema_size = 0;
  double avg_triplets_per_sentence = 0.0;
};

/// `records` should hold one final record per document.
SchemaStats schema_stats(const Schema& schema, std::span<const ExtractionRecord> records);

/// Candidate and reference triplets of one document.
struct ScoredPair {
  std::string document_id;
  std::vector<Triplet> candidates;
  std::vector<Triplet> references;
};

struct EvalReport {
  std::map<MatchCriterion, Prf> criteria;
  std::optional<std::size_t> schema_size;
  std::optional<double> redundancy;
  double avg_triplets_per_sentence = 0.0;
  std::vector<std::string> warnings;
  WarningCounters counters;
};

/// Scores every pair under each requested criterion. avg_triplets_per_sentence
/// is the mean candidate count.
EvalReport evaluate_pairs(std::span<const ScoredPair> pairs,
                          std::span<const MatchCriterion> criteria = kAllCriteria);

}  // namespace edc::eval
