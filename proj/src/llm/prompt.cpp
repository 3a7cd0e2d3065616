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

#include "edc/llm/prompt.hpp"

#include <cctype>

namespace edc::llm {
namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::string substitute(std::string_view text, const PromptVars& vars) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if ((c == '{' || c == '}') && i + 1 < text.size() && text[i + 1] == c) {
      out.push_back(c);
      i += 2;
      continue;
    }
    if (c == '{') {
      std::size_t j = i + 1;
      while (j < text.size() && is_name_char(text[j])) ++j;
      if (j > i + 1 && j < text.size() && text[j] == '}') {
        const std::string_view name = text.substr(i + 1, j - i - 1);
        auto it = vars.find(name);
        if (it == vars.end()) throw UnboundPlaceholderError(std::string(name));
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

std::string render(const PromptTemplate& tmpl, const PromptVars& vars) {
  std::string examples;
  for (std::size_t i = 0; i < tmpl.few_shot_examples.size(); ++i) {
    const auto& ex = tmpl.few_shot_examples[i];
    PromptVars ex_vars = ex.fields;
    ex_vars["index"] = std::to_string(i + 1);
    ex_vars["output"] = ex.output;
    if (i > 0) examples += tmpl.example_separator;
    examples += substitute(tmpl.example_text, ex_vars);
  }
  PromptVars all = vars;
  all.insert_or_assign("examples", std::move(examples));
  return substitute(tmpl.template_text, all);
}

std::string quote_literal(std::string_view s) {
  const bool has_single = s.find('\'') != std::string_view::npos;
  const bool has_double = s.find('"') != std::string_view::npos;
  const char q = (has_single && !has_double) ? '"' : '\'';
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back(q);
  for (char c : s) {
    if (c == '\\' || c == q) out.push_back('\\');
    out.push_back(c);
  }
  out.push_back(q);
  return out;
}

std::string serialize_triplet(const Triplet& t) {
  return "[" + quote_literal(t.subject) + ", " + quote_literal(t.relation) +
         ", " + quote_literal(t.object) + "]";
}

std::string serialize_triplets(std::span<const Triplet> triplets) {
  std::string out = "[";
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    if (i > 0) out += ", ";
    out += serialize_triplet(triplets[i]);
  }
  out += "]";
  return out;
}

std::string serialize_strings(std::span<const std::string> items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += quote_literal(items[i]);
  }
  out += "]";
  return out;
}

}  // namespace edc::llm
