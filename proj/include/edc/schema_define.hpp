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

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edc/core_model.hpp"
#include "edc/llm/gateway.hpp"
#include "edc/prompts.hpp"

namespace edc::define {

struct DefinitionOutcome {
  std::map<std::string, std::string> definitions;
  std::vector<std::string> fallbacks;  // relations given the template text
  WarningCounters warnings;
};

/// Definition used when the model never defines a relation.
std::string fallback_definition(std::string_view relation);

/// One definition per distinct relation in `triplets`, requested in a single
/// prompt for the whole document. Relations the reply omits are asked for
/// once more; any still missing get fallback_definition. An empty triplet
/// list returns an empty map without calling the model.
DefinitionOutcome define_relations(std::string_view text,
                                   std::span<const Triplet> triplets,
                                   std::span<const prompts::FewShotRecord> examples,
                                   llm::Gateway& gateway,
                                   std::size_t few_shot_count = llm::kDefaultFewShotCount);

/// Completes `known` for the relations in `triplets`, asking the model at most
/// `asks` times (each time only for what is still missing) before falling
/// back.
DefinitionOutcome complete_definitions(
    std::string_view text, std::span<const Triplet> triplets,
    std::map<std::string, std::string> known,
    std::span<const prompts::FewShotRecord> examples, llm::Gateway& gateway,
    int asks, std::size_t few_shot_count = llm::kDefaultFewShotCount);

}  // namespace edc::define
