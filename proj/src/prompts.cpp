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

#include "edc/prompts.hpp"

#include <algorithm>
#include <optional>

#include "edc/llm/parse.hpp"

namespace edc::prompts {
namespace {

constexpr std::string_view kOieInstruction =
    "Given a piece of text, extract relational triplets in the form of "
    "[Subject, Relation, Object] from it.";

template <typename Fields>
llm::PromptTemplate build(std::string_view head, std::string_view query,
                          std::string_view example_text,
                          std::span<const FewShotRecord> examples,
                          std::size_t count, Fields&& fields) {
  llm::PromptTemplate t;
  t.template_text = std::string(head) + "{examples}\n" + std::string(query);
  t.example_text = example_text;
  for (const auto& rec : examples) {
    if (t.few_shot_examples.size() >= count) break;
    if (auto ex = fields(rec)) t.few_shot_examples.push_back(std::move(*ex));
  }
  return t;
}

}  // namespace

std::vector<std::string> record_entities(const FewShotRecord& record) {
  if (!record.entities.empty()) return record.entities;
  Hint collector;
  for (const auto& t : record.triplets) {
    collector.add_entity(t.subject);
    collector.add_entity(t.object);
  }
  return collector.candidate_entities();
}

llm::PromptTemplate oie_template(std::span<const FewShotRecord> examples,
                                 std::size_t count) {
  return build(std::string(kOieInstruction) + "\n\nHere are some examples:\n\n",
               "Now please extract triplets from the following text:\n{text}",
               "Example {index}:\n\nText: {text}\n\nTriplets: {output}\n",
               examples, count, [](const FewShotRecord& r) -> std::optional<llm::FewShotExample> {
                 return llm::FewShotExample{{{"text", r.text}},
                                            llm::serialize_triplets(r.triplets)};
               });
}

llm::PromptTemplate entity_template(std::span<const FewShotRecord> examples,
                                    std::size_t count) {
  return build(
      "Given a piece of text, extract a list of entities from it.\n\n"
      "Here are some examples:\n\n",
      "Now please extract entities from the following text:\n{text}",
      "Example {index}:\n\nText: {text}\n\nEntities: {output}\n", examples, count,
      [](const FewShotRecord& r) -> std::optional<llm::FewShotExample> {
        return llm::FewShotExample{{{"text", r.text}},
                                   llm::serialize_strings(record_entities(r))};
      });
}

llm::PromptTemplate refined_oie_template(std::span<const FewShotRecord> examples,
                                         std::size_t count) {
  return build(
      std::string(kOieInstruction) + "\n\nHere are some examples:\n\n",
      "Now please extract triplets from the following text:\n{text}\n{hint}",
      "Example {index}:\n\nText: {text}\n\nEntities: {entities}\n\nTriplets: "
      "{output}\n",
      examples, count,
      [](const FewShotRecord& r) -> std::optional<llm::FewShotExample> {
        return llm::FewShotExample{
            {{"text", r.text},
             {"entities", llm::serialize_strings(record_entities(r))}},
            llm::serialize_triplets(r.triplets)};
      });
}

llm::PromptTemplate definition_template(std::span<const FewShotRecord> examples,
                                        std::size_t count) {
  return build(
      "Given a piece of text and a list of relational triplets extracted from "
      "it, write a definition for each relation present.\n\n",
      "Now write a definition for each relation present in the triplets "
      "extracted from the following text:\n\nText: {text}\n\nTriplets: "
      "{triplets}",
      "Example {index}:\n\nText: {text}\n\nTriplets: {triplets}\n\n"
      "Definitions:\n{output}\n",
      examples, count,
      [](const FewShotRecord& r) -> std::optional<llm::FewShotExample> {
        if (r.definitions.empty()) return std::nullopt;
        return llm::FewShotExample{
            {{"text", r.text}, {"triplets", llm::serialize_triplets(r.triplets)}},
            render_definitions(r.definitions)};
      });
}

llm::PromptTemplate combined_template(std::span<const FewShotRecord> examples,
                                      std::size_t count) {
  return build(
      "Given a piece of text, extract relational triplets in the form of "
      "[Subject, Relation, Object] from it, then write a definition for each "
      "relation present.\n\nHere are some examples:\n\n",
      "Now please extract triplets from the following text and write a "
      "definition for each relation present:\n{text}",
      "Example {index}:\n\nText: {text}\n\n{output}\n", examples, count,
      [](const FewShotRecord& r) -> std::optional<llm::FewShotExample> {
        if (r.definitions.empty()) return std::nullopt;
        return llm::FewShotExample{
            {{"text", r.text}},
            "Triplets: " + llm::serialize_triplets(r.triplets) +
                "\n\nDefinitions:\n" + render_definitions(r.definitions)};
      });
}

std::string render_definitions(
    std::span<const std::pair<std::string, std::string>> definitions) {
  std::string out;
  for (std::size_t i = 0; i < definitions.size(); ++i) {
    if (i > 0) out += "\n";
    out += definitions[i].first + ": " + definitions[i].second;
  }
  return out;
}

std::string render_hint(const Hint& hint) {
  std::string out;
  if (!hint.candidate_entities().empty()) {
    out += "Entities: " + llm::serialize_strings(hint.candidate_entities()) + "\n";
  }
  const auto& relations = hint.candidate_relations();
  if (!relations.empty()) {
    if (!out.empty()) out += "\n";
    out +=
        "Here are some potential relations and their descriptions you may look "
        "out for during extraction:\n";
    for (std::size_t i = 0; i < relations.size(); ++i) {
      if (i > 0) out += "\n";
      out += std::to_string(i + 1) + ". " + relations[i].name;
      if (relations[i].definition) out += ": " + *relations[i].definition;
      out += "\n";
    }
  }
  return out;
}

std::string canonicalization_prompt(std::string_view text, const Triplet& triplet,
                                    std::string_view definition,
                                    std::span<const RelationDefinition> choices) {
  std::string out =
      "Given a piece of text, a relational triplet extracted from it, and the "
      "definition of the relation in it, choose the most appropriate relation "
      "to replace it in this context if there is any.\n\n";
  out += "Text: " + std::string(text) + "\n\n";
  out += "Triplets: " + llm::serialize_triplet(triplet) + "\n\n";
  out += "Definition of " + llm::quote_literal(triplet.relation) + ": " +
         std::string(definition) + "\n\n";
  out += "Choices:\n\n";
  for (std::size_t i = 0; i < choices.size(); ++i) {
    out += std::string(1, llm::mcq_letter(i)) + ". " + llm::quote_literal(choices[i].name) +
           ": " + choices[i].definition + "\n\n";
  }
  out += std::string(1, llm::mcq_letter(choices.size())) + ". None of the above";
  return out;
}

}  // namespace edc::prompts
