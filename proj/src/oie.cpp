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

#include "edc/oie.hpp"

#include <stdexcept>

#include "edc/llm/parse.hpp"

namespace edc::oie {
namespace {

void require_text(std::string_view text) {
  if (trim(text).empty()) throw std::invalid_argument("extraction input text is empty");
}

template <typename Out>
void note(Out& out, const std::vector<std::string>& warnings) {
  out.warnings.parse_warnings += static_cast<int>(warnings.size());
  out.messages.insert(out.messages.end(), warnings.begin(), warnings.end());
}

// A reply parses cleanly when it produced triplets or was an explicit empty
// list; only the "nothing usable" case is worth re-asking.
bool unusable(const llm::Parsed<std::vector<Triplet>>& parsed) {
  return parsed.value.empty() && !parsed.warnings.empty();
}

TripletExtraction ask_for_triplets(const std::string& prompt, const OieConfig& cfg,
                                   llm::Gateway& gateway) {
  TripletExtraction out;
  std::string current = prompt;
  for (int attempt = 0;; ++attempt) {
    const llm::Completion reply = gateway.complete_prompt(current);
    if (reply.truncated) ++out.warnings.truncated_outputs;
    auto parsed = llm::parse_triplet_list(reply.text);
    note(out, parsed.warnings);
    if (!unusable(parsed)) {
      out.triplets = std::move(parsed.value);
      return out;
    }
    if (attempt >= cfg.max_parse_retries) break;
    current = prompt + std::string(prompts::kTripletReask);
  }
  ++out.warnings.extraction_failures;
  out.messages.push_back("extraction produced no parseable triplets");
  return out;
}

}  // namespace

void OieConfig::validate() const {
  if (few_shot.empty()) {
    throw std::invalid_argument("few-shot example file yields no examples");
  }
  if (few_shot_count == 0) throw std::invalid_argument("few_shot_count must be >= 1");
}

TripletExtraction extract_triplets(std::string_view text, const OieConfig& cfg,
                                   llm::Gateway& gateway) {
  require_text(text);
  const auto tmpl = prompts::oie_template(cfg.few_shot, cfg.few_shot_count);
  return ask_for_triplets(llm::render(tmpl, {{"text", std::string(text)}}), cfg,
                          gateway);
}

EntityExtraction extract_entities(std::string_view text, const OieConfig& cfg,
                                  llm::Gateway& gateway) {
  require_text(text);
  const auto tmpl = prompts::entity_template(cfg.few_shot, cfg.few_shot_count);
  const llm::Completion reply =
      gateway.complete_prompt(llm::render(tmpl, {{"text", std::string(text)}}));
  EntityExtraction out;
  if (reply.truncated) ++out.warnings.truncated_outputs;
  auto parsed = llm::parse_string_list(reply.text);
  note(out, parsed.warnings);
  out.entities = std::move(parsed.value);
  return out;
}

TripletExtraction extract_refined(std::string_view text, const Hint& hint,
                                  const OieConfig& cfg, llm::Gateway& gateway) {
  if (hint.empty()) return extract_triplets(text, cfg, gateway);
  require_text(text);
  const auto tmpl = prompts::refined_oie_template(cfg.few_shot, cfg.few_shot_count);
  const std::string prompt = llm::render(
      tmpl, {{"text", std::string(text)}, {"hint", prompts::render_hint(hint)}});
  return ask_for_triplets(prompt, cfg, gateway);
}

CombinedExtraction extract_with_definitions(std::string_view text,
                                            const OieConfig& cfg,
                                            llm::Gateway& gateway) {
  if (!cfg.combined_mode) {
    throw std::logic_error("extract_with_definitions requires combined_mode");
  }
  require_text(text);
  const auto tmpl = prompts::combined_template(cfg.few_shot, cfg.few_shot_count);
  const llm::Completion reply =
      gateway.complete_prompt(llm::render(tmpl, {{"text", std::string(text)}}));

  CombinedExtraction out;
  if (reply.truncated) ++out.warnings.truncated_outputs;
  // Definitions follow a "Definitions:" header; anything before it is the
  // triplet list.
  const std::string_view body = reply.text;
  const auto header = body.find("Definitions:");
  const std::string_view triplet_part =
      header == std::string_view::npos ? body : body.substr(0, header);
  auto parsed = llm::parse_triplet_list(triplet_part);
  note(out, parsed.warnings);
  if (unusable(parsed)) {
    ++out.warnings.extraction_failures;
    out.messages.push_back("extraction produced no parseable triplets");
  }
  out.triplets = std::move(parsed.value);

  const auto relations = distinct_relations(out.triplets);
  if (relations.empty()) return out;
  if (header != std::string_view::npos) {
    auto defs = llm::parse_definitions(body.substr(header), relations);
    out.definitions = std::move(defs.definitions);
    out.missing_definitions = std::move(defs.missing);
  } else {
    out.missing_definitions = relations;
  }
  out.needs_backfill = !out.missing_definitions.empty();
  return out;
}

}  // namespace edc::oie
