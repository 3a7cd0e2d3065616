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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edc/core_model.hpp"

// Lenient parsers for model replies. Malformed fragments are skipped and
// reported as warnings; none of these throw on bad model output except
// parse_mcq_answer, whose caller owns the retry policy.

namespace edc::llm {

template <typename T>
struct Parsed {
  T value;
  std::vector<std::string> warnings;
};

/// Every innermost bracketed group in `text`, split into elements. Quoted
/// elements may use straight or curly single/double quotes; bare elements
/// are split on commas. Groups with an unterminated quote are skipped.
std::vector<std::vector<std::string>> bracket_groups(std::string_view text);

/// Every well-formed 3-element group becomes a normalized Triplet. A reply
/// consisting of an empty list yields no warning; a reply with no usable
/// group at all yields one.
Parsed<std::vector<Triplet>> parse_triplet_list(std::string_view text);

/// Elements of the first non-empty bracketed list, trimmed and deduplicated.
Parsed<std::vector<std::string>> parse_string_list(std::string_view text);

struct DefinitionParse {
  std::map<std::string, std::string> definitions;
  std::vector<std::string> missing;
};

/// Reads `name: sentence` lines, tolerating bullets, numbering, quotes and
/// emphasis markers around the name. Only expected relations are recorded;
/// the first definition for a name wins. Throws std::invalid_argument if
/// `expected_relations` is empty.
DefinitionParse parse_definitions(std::string_view text,
                                  std::span<const std::string> expected_relations);

class AmbiguousMcqError : public std::runtime_error {
 public:
  AmbiguousMcqError() : std::runtime_error("ambiguous MCQ response") {}
};

/// Letters A.. name the `num_choices` candidates; the next letter is "None of
/// the above". Returns the candidate index, or nullopt for none-of-the-above.
/// Throws AmbiguousMcqError when no single choice can be identified.
std::optional<std::size_t> parse_mcq_answer(std::string_view text,
                                            std::size_t num_choices);

inline char mcq_letter(std::size_t index) {
  return static_cast<char>('A' + index);
}

}  // namespace edc::llm
