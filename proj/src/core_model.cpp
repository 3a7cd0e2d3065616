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

#include "edc/core_model.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace edc {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string normalize_relation(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  bool pending_space = false;
  for (char c : name) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::optional<std::string> triplet_defect(std::string_view subject,
                                          std::string_view relation,
                                          std::string_view object) {
  if (trim(subject).empty()) return "empty subject";
  if (trim(object).empty()) return "empty object";
  const std::string rel = normalize_relation(relation);
  if (rel.empty()) return "empty relation";
  if (rel.find_first_of("[]{},") != std::string::npos) {
    return "relation contains a list delimiter: " + rel;
  }
  return std::nullopt;
}

std::optional<Triplet> Triplet::try_make(std::string_view subject,
                                         std::string_view relation,
                                         std::string_view object) {
  if (triplet_defect(subject, relation, object)) return std::nullopt;
  return Triplet{trim(subject), normalize_relation(relation), trim(object)};
}

Triplet Triplet::make(std::string_view subject, std::string_view relation,
                      std::string_view object) {
  if (auto defect = triplet_defect(subject, relation, object)) {
    throw InvariantError("invalid triplet: " + *defect);
  }
  return Triplet{trim(subject), normalize_relation(relation), trim(object)};
}

Triplet Triplet::with_relation(std::string relation_name) const {
  return make(subject, relation_name, object);
}

std::vector<Triplet> dedupe_triplets(std::span<const Triplet> triplets) {
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::vector<Triplet> out;
  out.reserve(triplets.size());
  for (const auto& t : triplets) {
    auto key = std::make_tuple(trim(t.subject), normalize_relation(t.relation),
                               trim(t.object));
    if (seen.insert(key).second) out.push_back(t);
  }
  return out;
}

std::vector<std::string> distinct_relations(std::span<const Triplet> triplets) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& t : triplets) {
    std::string r = normalize_relation(t.relation);
    if (seen.insert(r).second) out.push_back(std::move(r));
  }
  return out;
}

void Schema::insert(std::string name, std::string definition) {
  if (name.empty()) throw InvariantError("schema relation name is empty");
  if (by_name_.contains(name)) {
    throw InvariantError("duplicate schema relation: " + name);
  }
  by_name_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), std::move(definition)});
}

void Schema::add(std::string_view name, std::string_view definition) {
  std::string def = trim(definition);
  if (def.empty()) {
    throw InvariantError("empty definition for relation: " +
                         normalize_relation(name));
  }
  insert(normalize_relation(name), std::move(def));
}

void Schema::add_undefined(std::string_view name) {
  insert(normalize_relation(name), "");
}

bool Schema::contains(std::string_view name) const {
  return by_name_.contains(normalize_relation(name));
}

const RelationDefinition* Schema::find(std::string_view name) const {
  auto it = by_name_.find(normalize_relation(name));
  return it == by_name_.end() ? nullptr : &entries_[it->second];
}

std::string Schema::definition_of(std::string_view name) const {
  const auto* entry = find(name);
  return entry ? entry->definition : std::string();
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Aligned:
      return "aligned";
    case ActionKind::Dropped:
      return "dropped";
    case ActionKind::Added:
      return "added";
  }
  return "unknown";
}

ActionKind action_kind_from_string(std::string_view s) {
  if (s == "aligned") return ActionKind::Aligned;
  if (s == "dropped") return ActionKind::Dropped;
  if (s == "added") return ActionKind::Added;
  throw InvariantError("unknown canonicalization action: " + std::string(s));
}

CanonicalizationAction CanonicalizationAction::aligned(std::string source,
                                                       std::string target) {
  return {ActionKind::Aligned, std::move(source), std::move(target)};
}

CanonicalizationAction CanonicalizationAction::dropped(std::string source) {
  return {ActionKind::Dropped, std::move(source), std::nullopt};
}

CanonicalizationAction CanonicalizationAction::added(std::string source) {
  return {ActionKind::Added, std::move(source), std::nullopt};
}

WarningCounters& WarningCounters::operator+=(const WarningCounters& other) {
  parse_warnings += other.parse_warnings;
  extraction_failures += other.extraction_failures;
  definition_fallbacks += other.definition_fallbacks;
  mcq_ambiguous += other.mcq_ambiguous;
  retrieval_failures += other.retrieval_failures;
  truncated_outputs += other.truncated_outputs;
  backend_failures += other.backend_failures;
  return *this;
}

int WarningCounters::total() const {
  return parse_warnings + extraction_failures + definition_fallbacks +
         mcq_ambiguous + retrieval_failures + truncated_outputs +
         backend_failures;
}

void Hint::add_entity(std::string_view entity) {
  std::string e = trim(entity);
  if (e.empty()) return;
  if (std::find(entities_.begin(), entities_.end(), e) == entities_.end()) {
    entities_.push_back(std::move(e));
  }
}

void Hint::add_relation(std::string_view name,
                        std::optional<std::string> definition) {
  std::string n = normalize_relation(name);
  if (n.empty()) return;
  if (definition && trim(*definition).empty()) definition.reset();
  auto it = std::find_if(relations_.begin(), relations_.end(),
                         [&n](const HintRelation& r) { return r.name == n; });
  if (it == relations_.end()) {
    relations_.push_back({std::move(n), std::move(definition)});
  } else if (!it->definition && definition) {
    it->definition = std::move(definition);
  }
}

std::vector<Triplet> apply_actions(
    std::span<const Triplet> open_triplets,
    std::span<const CanonicalizationAction> actions) {
  if (open_triplets.size() != actions.size()) {
    throw InvariantError("action log length does not match input triplets");
  }
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& a = actions[i];
    const auto& t = open_triplets[i];
    if (a.source_relation != t.relation) {
      throw InvariantError("action source '" + a.source_relation +
                           "' does not match triplet relation '" + t.relation +
                           "'");
    }
    switch (a.kind) {
      case ActionKind::Aligned:
        out.push_back(t.with_relation(a.target_relation.value()));
        break;
      case ActionKind::Added:
        out.push_back(t);
        break;
      case ActionKind::Dropped:
        break;
    }
  }
  return out;
}

}  // namespace edc
