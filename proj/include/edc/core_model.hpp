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
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace edc {

/// Thrown when a value violates a domain invariant (empty field, duplicate
/// schema entry, malformed record).
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Trims ASCII whitespace from both ends.
std::string trim(std::string_view s);

/// Trims and collapses internal whitespace runs to a single space. Case is
/// preserved; an empty result is returned as-is and must be rejected by the
/// caller.
std::string normalize_relation(std::string_view name);

/// One (subject, relation, object) fact. Construct through `make` or
/// `try_make`; both normalize and validate.
struct Triplet {
  std::string subject;
  std::string relation;
  std::string object;

  static Triplet make(std::string_view subject, std::string_view relation,
                      std::string_view object);
  static std::optional<Triplet> try_make(std::string_view subject,
                                         std::string_view relation,
                                         std::string_view object);

  Triplet with_relation(std::string relation_name) const;

  friend bool operator==(const Triplet&, const Triplet&) = default;
  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

/// Reason a (subject, relation, object) tuple is not a valid Triplet, or
/// nullopt when it is valid after normalization.
std::optional<std::string> triplet_defect(std::string_view subject,
                                          std::string_view relation,
                                          std::string_view object);

/// Keeps the first occurrence of each triplet; comparison is after
/// normalization, order otherwise preserved.
std::vector<Triplet> dedupe_triplets(std::span<const Triplet> triplets);

/// Distinct relation names in first-seen order.
std::vector<std::string> distinct_relations(std::span<const Triplet> triplets);

struct RelationDefinition {
  std::string name;
  std::string definition;

  friend bool operator==(const RelationDefinition&,
                         const RelationDefinition&) = default;
};

/// Insertion-ordered relation name -> definition map. Names are unique after
/// normalize_relation; comparison is case-sensitive.
class Schema {
 public:
  Schema() = default;

  /// Throws InvariantError on a duplicate or empty name, or empty definition.
  void add(std::string_view name, std::string_view definition);
  /// Like add, but an empty definition is accepted (self mode seeds, open
  /// schemas before definitions exist).
  void add_undefined(std::string_view name);

  bool contains(std::string_view name) const;
  const RelationDefinition* find(std::string_view name) const;
  /// Empty string when the relation is unknown or undefined.
  std::string definition_of(std::string_view name) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<RelationDefinition>& entries() const { return entries_; }
  std::vector<std::string> names() const;

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const Schema& a, const Schema& b) {
    return a.entries_ == b.entries_;
  }

 private:
  void insert(std::string name, std::string definition);

  std::vector<RelationDefinition> entries_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

struct Document {
  std::string id;
  std::string text;
  std::optional<std::vector<Triplet>> reference_triplets;
};

enum class ActionKind { Aligned, Dropped, Added };

std::string_view to_string(ActionKind kind);
ActionKind action_kind_from_string(std::string_view s);

/// How one open triplet's relation was handled during canonicalization.
struct CanonicalizationAction {
  ActionKind kind;
  std::string source_relation;
  std::optional<std::string> target_relation;

  static CanonicalizationAction aligned(std::string source, std::string target);
  static CanonicalizationAction dropped(std::string source);
  static CanonicalizationAction added(std::string source);

  friend bool operator==(const CanonicalizationAction&,
                         const CanonicalizationAction&) = default;
};

/// Per-document counters surfaced in results and reports.
struct WarningCounters {
  int parse_warnings = 0;
  int extraction_failures = 0;
  int definition_fallbacks = 0;
  int mcq_ambiguous = 0;
  int retrieval_failures = 0;
  int truncated_outputs = 0;
  int backend_failures = 0;

  WarningCounters& operator+=(const WarningCounters& other);
  int total() const;
  friend bool operator==(const WarningCounters&,
                         const WarningCounters&) = default;
};

struct ExtractionRecord {
  std::string document_id;
  int iteration = 0;
  std::vector<Triplet> oie_triplets;
  std::map<std::string, std::string> definitions;
  std::vector<Triplet> canonical_triplets;
  std::vector<CanonicalizationAction> actions;
  WarningCounters warnings;

  friend bool operator==(const ExtractionRecord&,
                         const ExtractionRecord&) = default;
};

struct HintRelation {
  std::string name;
  std::optional<std::string> definition;

  friend bool operator==(const HintRelation&, const HintRelation&) = default;
};

/// Refinement context for one document. Both lists keep first-seen order and
/// hold each item once.
class Hint {
 public:
  /// Ignores empty strings and repeats.
  void add_entity(std::string_view entity);
  /// Ignores empty names and repeats; a repeat may fill in a missing
  /// definition.
  void add_relation(std::string_view name,
                    std::optional<std::string> definition = std::nullopt);

  const std::vector<std::string>& candidate_entities() const { return entities_; }
  const std::vector<HintRelation>& candidate_relations() const { return relations_; }
  bool empty() const { return entities_.empty() && relations_.empty(); }

 private:
  std::vector<std::string> entities_;
  std::vector<HintRelation> relations_;
};

/// Replays the action log over the open triplets: Aligned renames, Dropped
/// removes, Added keeps. Throws InvariantError if the log does not line up
/// one-to-one with the input.
std::vector<Triplet> apply_actions(
    std::span<const Triplet> open_triplets,
    std::span<const CanonicalizationAction> actions);

}  // namespace edc
