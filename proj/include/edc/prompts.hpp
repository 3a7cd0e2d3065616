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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edc/core_model.hpp"
#include "edc/llm/prompt.hpp"

// Prompt layouts for every LLM-backed step. Each few-shot template takes the
// first `count` usable records from the user's example file.

namespace edc::prompts {

/// One record of the few-shot example file.
struct FewShotRecord {
  std::string text;
  std::vector<Triplet> triplets;
  std::vector<std::string> entities;  // derived from triplets when absent
  std::vector<std::pair<std::string, std::string>> definitions;
};

/// Subjects and objects of the record's triplets when it lists no entities.
std::vector<std::string> record_entities(const FewShotRecord& record);

llm::PromptTemplate oie_template(std::span<const FewShotRecord> examples,
                                 std::size_t count = llm::kDefaultFewShotCount);
llm::PromptTemplate entity_template(std::span<const FewShotRecord> examples,
                                    std::size_t count = llm::kDefaultFewShotCount);
llm::PromptTemplate refined_oie_template(
    std::span<const FewShotRecord> examples,
    std::size_t count = llm::kDefaultFewShotCount);
/// Only records that carry definitions are used as examples.
llm::PromptTemplate definition_template(
    std::span<const FewShotRecord> examples,
    std::size_t count = llm::kDefaultFewShotCount);
llm::PromptTemplate combined_template(std::span<const FewShotRecord> examples,
                                      std::size_t count = llm::kDefaultFewShotCount);

/// "Entities: [...]" followed by the numbered candidate relations. Empty
/// sections are omitted; an empty hint renders as "".
std::string render_hint(const Hint& hint);

/// "name: definition" lines, one per relation.
std::string render_definitions(
    std::span<const std::pair<std::string, std::string>> definitions);

/// Multiple-choice verification prompt. Choices are lettered from A in the
/// given order; the letter after the last choice is "None of the above".
std::string canonicalization_prompt(std::string_view text, const Triplet& triplet,
                                    std::string_view definition,
                                    std::span<const RelationDefinition> choices);

/// Appended to a prompt when the first reply could not be used.
inline constexpr std::string_view kTripletReask =
    "\n\nAnswer only with the list of triplets, formatted as "
    "[['Subject', 'Relation', 'Object'], ...].";
inline constexpr std::string_view kMcqReask =
    "\n\nAnswer with the letter of exactly one choice.";

}  // namespace edc::prompts
