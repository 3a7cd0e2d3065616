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

#include "edc/schema_define.hpp"

#include <algorithm>
#include <set>

#include "edc/llm/parse.hpp"

namespace edc::define {

std::string fallback_definition(std::string_view relation) {
  return "The subject entity has the relation '" + std::string(relation) +
         "' to the object entity.";
}

DefinitionOutcome complete_definitions(
    std::string_view text, std::span<const Triplet> triplets,
    std::map<std::string, std::string> known,
    std::span<const prompts::FewShotRecord> examples, llm::Gateway& gateway,
    int asks, std::size_t few_shot_count) {
  DefinitionOutcome out;
  const auto relations = distinct_relations(triplets);
  for (const auto& r : relations) {
    if (auto it = known.find(r); it != known.end() && !trim(it->second).empty()) {
      out.definitions.emplace(r, trim(it->second));
    }
  }
  auto missing = [&] {
    std::vector<std::string> m;
    for (const auto& r : relations) {
      if (!out.definitions.contains(r)) m.push_back(r);
    }
    return m;
  };

  const auto tmpl = prompts::definition_template(examples, few_shot_count);
  for (int attempt = 0; attempt < asks; ++attempt) {
    const auto pending = missing();
    if (pending.empty()) break;
    const std::set<std::string> wanted(pending.begin(), pending.end());
    std::vector<Triplet> subset;
    for (const auto& t : triplets) {
      if (wanted.contains(t.relation)) subset.push_back(t);
    }
    const llm::Completion reply = gateway.complete_prompt(llm::render(
        tmpl, {{"text", std::string(text)},
               {"triplets", llm::serialize_triplets(subset)}}));
    if (reply.truncated) ++out.warnings.truncated_outputs;
    auto parsed = llm::parse_definitions(reply.text, pending);
    for (auto& [name, def] : parsed.definitions) {
      out.definitions.emplace(name, std::move(def));
    }
  }

  for (const auto& r : missing()) {
    out.definitions.emplace(r, fallback_definition(r));
    out.fallbacks.push_back(r);
    ++out.warnings.definition_fallbacks;
  }
  return out;
}

DefinitionOutcome define_relations(std::string_view text,
                                   std::span<const Triplet> triplets,
                                   std::span<const prompts::FewShotRecord> examples,
                                   llm::Gateway& gateway,
                                   std::size_t few_shot_count) {
  return complete_definitions(text, triplets, {}, examples, gateway, 2,
                              few_shot_count);
}

}  // namespace edc::define
