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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edc/core_model.hpp"

namespace edc::llm {

inline constexpr std::size_t kDefaultFewShotCount = 6;

class UnboundPlaceholderError : public std::invalid_argument {
 public:
  explicit UnboundPlaceholderError(const std::string& name)
      : std::invalid_argument("unbound placeholder: {" + name + "}"),
        name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

using PromptVars = std::map<std::string, std::string, std::less<>>;

struct FewShotExample {
  PromptVars fields;
  std::string output;
};

/// A prompt with `{name}` placeholders. `{examples}` in template_text expands
/// to each few-shot example rendered through example_text (which may use
/// `{index}`, `{output}` and the example's own fields), joined by
/// example_separator. `{{` and `}}` produce literal braces.
struct PromptTemplate {
  std::string template_text;
  std::string example_text;
  std::string example_separator = "\n";
  std::vector<FewShotExample> few_shot_examples;
};

/// Substitutes placeholders in `text`. Substituted values are not rescanned.
std::string substitute(std::string_view text, const PromptVars& vars);

std::string render(const PromptTemplate& tmpl, const PromptVars& vars);

/// Python-literal style quoting: single quotes unless the value contains a
/// single quote and no double quote.
std::string quote_literal(std::string_view s);
std::string serialize_triplet(const Triplet& t);
std::string serialize_triplets(std::span<const Triplet> triplets);
std::string serialize_strings(std::span<const std::string> items);

}  // namespace edc::llm
