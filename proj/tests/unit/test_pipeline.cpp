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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <set>

#include "edc/canonicalize.hpp"
#include "edc/oie.hpp"
#include "edc/refine.hpp"
#include "edc/schema_define.hpp"
#include "support/corpus.hpp"
#include "support/fakes.hpp"

namespace edc {
namespace {

using testing::alan_shepard;
using testing::Corpus;
using testing::HashingEmbedder;
using testing::LambdaLlm;
using testing::make_stack;
using testing::ScriptedLlm;
using testing::Stack;
using testing::synonym_corpus;
using ::testing::Contains;

oie::OieConfig oie_config(const Corpus& c) {
  oie::OieConfig cfg;
  cfg.few_shot = c.few_shot;
  return cfg;
}

Stack scripted(const Corpus& c) {
  return make_stack(std::make_shared<ScriptedLlm>(c.world), std::make_shared<HashingEmbedder>());
}

Stack lambda(LambdaLlm::Fn fn) {
  return make_stack(std::make_shared<LambdaLlm>(std::move(fn)),
                    std::make_shared<HashingEmbedder>());
}

LambdaLlm& lambda_of(Stack& s) { return static_cast<LambdaLlm&>(*s.chat); }

refine::PipelineConfig pipeline_config(const Corpus& c, canon::CanonMode mode, int iterations) {
  refine::PipelineConfig cfg;
  cfg.mode = mode;
  cfg.iterations = iterations;
  cfg.oie = oie_config(c);
  cfg.jobs = 4;
  return cfg;
}

std::set<std::string> relations_of(const std::vector<Triplet>& ts) {
  std::set<std::string> out;
  for (const auto& t : ts) out.insert(t.relation);
  return out;
}

const std::string& shepard_text(const Corpus& c) { return c.docs.front().text; }

// ---- open extraction ----

TEST(Oie, ShepardBaseTriplets) {
  const Corpus c = alan_shepard();
  Stack s = scripted(c);
  const auto r = oie::extract_triplets(shepard_text(c), oie_config(c), *s.gateway);
  EXPECT_EQ(r.triplets,
            (std::vector<Triplet>{Triplet::make("Alan Shepard", "bornOn", "Nov 18, 1923"),
                                  Triplet::make("Alan Shepard", "participatedIn", "Apollo 14")}));
  EXPECT_EQ(r.warnings.total(), 0);
}

TEST(Oie, EmptyReplyIsValid) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string&) { return llm::Completion{"[]", false}; });
  const auto r = oie::extract_triplets("Nothing happens here.", oie_config(c), *s.gateway);
  EXPECT_TRUE(r.triplets.empty());
  EXPECT_EQ(r.warnings.total(), 0);
  EXPECT_EQ(lambda_of(s).calls(), 1);
}

TEST(Oie, DuplicatesCollapse) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string&) {
    return llm::Completion{"[['A', 'r', 'B'], ['A', 'r', 'B'], ['A', 'r', 'C']]", false};
  });
  EXPECT_EQ(oie::extract_triplets("t", oie_config(c), *s.gateway).triplets.size(), 2u);
}

TEST(Oie, UnparseableReplyIsReaskedThenGivesUp) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string&) { return llm::Completion{"I refuse.", false}; });
  const auto r = oie::extract_triplets("t", oie_config(c), *s.gateway);
  EXPECT_TRUE(r.triplets.empty());
  EXPECT_EQ(r.warnings.extraction_failures, 1);
  const auto prompts = lambda_of(s).prompts();
  ASSERT_EQ(prompts.size(), 2u);
  EXPECT_NE(prompts[0], prompts[1]);
}

TEST(Oie, ReaskRecovers) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string& p) {
    const bool reask = p.find("Answer only with the list") != std::string::npos;
    return llm::Completion{reask ? "[['A', 'r', 'B']]" : "hmm", false};
  });
  const auto r = oie::extract_triplets("t", oie_config(c), *s.gateway);
  EXPECT_EQ(r.triplets.size(), 1u);
  EXPECT_EQ(r.warnings.extraction_failures, 0);
}

TEST(Oie, AdversarialRepliesNeverYieldMalformedTriplets) {
  const Corpus c = alan_shepard();
  const std::vector<std::string> replies = {
      "[[['A', 'r', 'B']]]", "[['A', '', 'B']]", "[['A', 'a,b', 'B'], ['C', 's', 'D']]",
      "text [ with ] stray [brackets", "[['  ', 'r', 'B']]", "[[A, r, B], ['x', '[y]', 'z']]",
      "]]]]", "[[\"unterminated, 'r', 'B']]"};
  for (const auto& reply : replies) {
    Stack s = lambda([reply](const std::string&) { return llm::Completion{reply, false}; });
    for (const auto& t : oie::extract_triplets("t", oie_config(c), *s.gateway).triplets) {
      EXPECT_FALSE(triplet_defect(t.subject, t.relation, t.object).has_value()) << reply;
      EXPECT_EQ(t, Triplet::make(t.subject, t.relation, t.object)) << reply;
    }
  }
}

TEST(Oie, RequiresFewShotExamples) {
  oie::OieConfig cfg;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Oie, ShepardEntities) {
  const Corpus c = alan_shepard();
  Stack s = scripted(c);
  const auto r = oie::extract_entities(shepard_text(c), oie_config(c), *s.gateway);
  EXPECT_EQ(r.entities, (std::vector<std::string>{"Alan Shepard", "Nov 18, 1923", "NASA",
                                                  "1959", "Apollo 14"}));
}

TEST(Oie, EmptyHintIsPlainExtraction) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string&) { return llm::Completion{"[['A', 'r', 'B']]", false}; });
  oie::extract_triplets("some text", oie_config(c), *s.gateway);
  oie::extract_refined("some text", Hint{}, oie_config(c), *s.gateway);
  const auto prompts = lambda_of(s).prompts();
  ASSERT_EQ(prompts.size(), 2u);
  EXPECT_EQ(prompts[0], prompts[1]);
}

TEST(Oie, RefinedPromptCarriesHint) {
  const Corpus c = alan_shepard();
  Hint h;
  h.add_entity("Alan Shepard");
  h.add_relation("selectedByNasa", "The subject entity was selected by NASA.");
  Stack s = scripted(c);
  const auto r = oie::extract_refined(shepard_text(c), h, oie_config(c), *s.gateway);
  EXPECT_THAT(r.triplets, Contains(Triplet::make("Alan Shepard", "selectedByNasa", "1959")));
}

TEST(Oie, RefinedNeverInjectsHintRelations) {
  const Corpus c = alan_shepard();
  Hint h;
  h.add_relation("draftPick", "irrelevant");
  h.add_relation("season");
  const std::string reply = "[['Alan Shepard', 'birthDate', 'Nov 18, 1923']]";
  Stack s = lambda([&](const std::string&) { return llm::Completion{reply, false}; });
  const auto r = oie::extract_refined(shepard_text(c), h, oie_config(c), *s.gateway);
  for (const auto& t : r.triplets) {
    EXPECT_NE(reply.find("'" + t.relation + "'"), std::string::npos);
  }
  EXPECT_EQ(relations_of(r.triplets), std::set<std::string>{"birthDate"});
}

TEST(Oie, CombinedModeParsesBothParts) {
  Corpus c = alan_shepard();
  oie::OieConfig cfg = oie_config(c);
  EXPECT_THROW(oie::extract_with_definitions(shepard_text(c), cfg, *scripted(c).gateway),
               std::logic_error);
  cfg.combined_mode = true;
  Stack s = scripted(c);
  const auto r = oie::extract_with_definitions(shepard_text(c), cfg, *s.gateway);
  EXPECT_EQ(r.triplets.size(), 2u);
  EXPECT_EQ(r.definitions.at("participatedIn"), c.world.definitions.at("participatedIn"));
  EXPECT_FALSE(r.needs_backfill);
}

TEST(Oie, CombinedModeWithoutDefinitionsNeedsBackfill) {
  Corpus c = alan_shepard();
  oie::OieConfig cfg = oie_config(c);
  cfg.combined_mode = true;
  Stack s = lambda([](const std::string&) {
    return llm::Completion{"Triplets: [['A', 'r', 'B']]", false};
  });
  const auto r = oie::extract_with_definitions("t", cfg, *s.gateway);
  EXPECT_EQ(r.triplets.size(), 1u);
  EXPECT_TRUE(r.definitions.empty());
  EXPECT_TRUE(r.needs_backfill);
  EXPECT_EQ(r.missing_definitions, std::vector<std::string>{"r"});

  Stack e = lambda([](const std::string&) {
    return llm::Completion{"Triplets: []\n\nDefinitions:\n", false};
  });
  const auto empty = oie::extract_with_definitions("t", cfg, *e.gateway);
  EXPECT_TRUE(empty.triplets.empty());
  EXPECT_TRUE(empty.definitions.empty());
}

// ---- definitions ----

TEST(Define, ShepardDefinitions) {
  const Corpus c = alan_shepard();
  Stack s = scripted(c);
  const auto open = oie::extract_triplets(shepard_text(c), oie_config(c), *s.gateway).triplets;
  const auto d = define::define_relations(shepard_text(c), open, c.few_shot, *s.gateway);
  EXPECT_EQ(d.definitions.at("bornOn"),
            "The subject entity was born on the date specified by the object entity.");
  EXPECT_EQ(d.definitions.at("participatedIn"),
            "The subject entity took part in the event or mission specified by the object entity.");
  EXPECT_TRUE(d.fallbacks.empty());
}

TEST(Define, RetryFillsOmission) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string& p) {
    // The first ask names both relations; the re-ask only the missing one.
    if (p.find("'s'") != std::string::npos && p.find("'r'") == std::string::npos) {
      return llm::Completion{"s: The subject entity is s-related.", false};
    }
    return llm::Completion{"r: The subject entity is r-related.", false};
  });
  const std::vector<Triplet> ts = {Triplet::make("A", "r", "B"), Triplet::make("A", "s", "C")};
  const auto d = define::define_relations("t", ts, c.few_shot, *s.gateway);
  EXPECT_EQ(d.definitions.size(), 2u);
  EXPECT_TRUE(d.fallbacks.empty());
  EXPECT_EQ(d.warnings.definition_fallbacks, 0);
  EXPECT_EQ(lambda_of(s).calls(), 2);
}

TEST(Define, FallbackAfterRetry) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string&) { return llm::Completion{"r: defined.", false}; });
  const std::vector<Triplet> ts = {Triplet::make("A", "r", "B"), Triplet::make("A", "s", "C")};
  const auto d = define::define_relations("t", ts, c.few_shot, *s.gateway);
  EXPECT_EQ(d.definitions.at("s"),
            "The subject entity has the relation 's' to the object entity.");
  EXPECT_EQ(d.definitions.at("s"), define::fallback_definition("s"));
  EXPECT_EQ(d.fallbacks, std::vector<std::string>{"s"});
  EXPECT_EQ(d.warnings.definition_fallbacks, 1);
}

TEST(Define, KeysEqualDistinctRelations) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string&) { return llm::Completion{"x: ignored", false}; });
  const std::vector<Triplet> ts = {Triplet::make("A", "r", "B"), Triplet::make("A", "s", "C"),
                                   Triplet::make("D", "r", "E")};
  const auto d = define::define_relations("t", ts, c.few_shot, *s.gateway);
  std::set<std::string> keys;
  for (const auto& [k, v] : d.definitions) keys.insert(k);
  EXPECT_EQ(keys, (std::set<std::string>{"r", "s"}));
}

TEST(Define, EmptyInputMakesNoCall) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string&) { return llm::Completion{"", false}; });
  EXPECT_TRUE(define::define_relations("t", {}, c.few_shot, *s.gateway).definitions.empty());
  EXPECT_EQ(lambda_of(s).calls(), 0);
}

// ---- canonicalization ----

TEST(Canon, TargetIndexPreconditions) {
  Stack s = lambda([](const std::string&) { return llm::Completion{"", false}; });
  EXPECT_THROW(canon::build_target_index(Schema{}, *s.embedder), InvariantError);
  Schema one;
  one.add("r", "def");
  EXPECT_EQ(canon::build_target_index(one, *s.embedder).index().size(), 1u);
  Schema undefined;
  undefined.add_undefined("q");
  EXPECT_THROW(canon::build_target_index(undefined, *s.embedder), InvariantError);
}

TEST(Canon, ShepardTargetAlignment) {
  const Corpus c = alan_shepard();
  Stack s = scripted(c);
  auto state = canon::build_target_index(c.target, *s.embedder);
  const auto before = state;
  canon::CanonConfig cfg;
  const auto r = canon::canonicalize_document(
      std::vector<Triplet>{Triplet::make("Alan Shepard", "bornOn", "Nov 18, 1923"),
       Triplet::make("Alan Shepard", "participatedIn", "Apollo 14")},
      {{"bornOn", c.world.definitions.at("bornOn")},
       {"participatedIn", c.world.definitions.at("participatedIn")}},
      state, cfg, shepard_text(c), *s.gateway, *s.embedder);
  EXPECT_EQ(r.triplets,
            (std::vector<Triplet>{Triplet::make("Alan Shepard", "birthDate", "Nov 18, 1923"),
                                  Triplet::make("Alan Shepard", "mission", "Apollo 14")}));
  EXPECT_EQ(r.actions[1], CanonicalizationAction::aligned("participatedIn", "mission"));
  EXPECT_EQ(state, before);
}

TEST(Canon, TargetModeDropsUnalignable) {
  const Corpus c = synonym_corpus(1, 1, true);
  Stack s = scripted(c);
  auto state = canon::build_target_index(c.target, *s.embedder);
  canon::CanonConfig cfg;
  const auto r = canon::canonicalize_triplet(
      Triplet::make("Avery Stone", "enjoys", "chess"), c.world.definitions.at("enjoys"), state,
      cfg, "Avery Stone enjoys chess.", *s.gateway, *s.embedder);
  EXPECT_FALSE(r.triplet.has_value());
  EXPECT_EQ(r.action.kind, ActionKind::Dropped);
  EXPECT_EQ(r.llm_calls, 1);
  EXPECT_EQ(state.schema(), c.target);
}

TEST(Canon, ChoicesLimitedToCandidateK) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string&) { return llm::Completion{"A", false}; });
  auto state = canon::build_target_index(c.target, *s.embedder);
  canon::CanonConfig cfg;
  cfg.candidate_k = 3;
  canon::canonicalize_triplet(Triplet::make("A", "bornOn", "B"), "born on", state, cfg, "t",
                              *s.gateway, *s.embedder);
  const std::string p = lambda_of(s).prompts().at(0);
  EXPECT_NE(p.find("\nC. '"), std::string::npos);
  EXPECT_NE(p.find("D. None of the above"), std::string::npos);
  EXPECT_EQ(p.find("\nE. "), std::string::npos);
}

TEST(Canon, SelfModeMergesSynonyms) {
  Corpus c = alan_shepard();
  c.world.cluster["birthOn"] = "birth";
  Stack s = scripted(c);
  canon::CanonicalSchemaState state;
  canon::CanonConfig cfg;
  cfg.mode = canon::CanonMode::SelfCanonicalization;
  const auto first = canon::canonicalize_triplet(
      Triplet::make("A", "bornOn", "1923"), "The subject entity was born on the object date.",
      state, cfg, "t", *s.gateway, *s.embedder);
  EXPECT_EQ(first.action.kind, ActionKind::Added);
  EXPECT_EQ(first.llm_calls, 0);
  const std::size_t size_before = state.schema().size();
  const auto second = canon::canonicalize_triplet(
      Triplet::make("B", "birthOn", "1950"), "The subject entity's birth was on the object date.",
      state, cfg, "t", *s.gateway, *s.embedder);
  EXPECT_EQ(second.action, CanonicalizationAction::aligned("birthOn", "bornOn"));
  EXPECT_EQ(second.triplet, Triplet::make("B", "bornOn", "1950"));
  EXPECT_EQ(state.schema().size() - size_before, 0u);
  EXPECT_EQ(state.schema().size(), 1u);  // two open relations, delta of one overall
}

TEST(Canon, SelfModeAddsNovelRelation) {
  Corpus c = alan_shepard();
  Stack s = scripted(c);
  canon::CanonicalSchemaState state;
  canon::CanonConfig cfg;
  cfg.mode = canon::CanonMode::SelfCanonicalization;
  const auto r = canon::canonicalize_document(
      std::vector<Triplet>{Triplet::make("A", "bornOn", "1923"), Triplet::make("A", "participatedIn", "X")},
      {{"bornOn", "born"}, {"participatedIn", "took part"}}, state, cfg, "t", *s.gateway,
      *s.embedder);
  EXPECT_EQ(state.schema().names(), (std::vector<std::string>{"bornOn", "participatedIn"}));
  EXPECT_EQ(state.index().keys(), state.schema().names());
  for (const auto& a : r.actions) EXPECT_NE(a.kind, ActionKind::Dropped);
}

TEST(Canon, ExactNamesShortCircuit) {
  const Corpus c = alan_shepard();
  Stack s = scripted(c);
  auto state = canon::build_target_index(c.target, *s.embedder);
  canon::CanonConfig cfg;
  const auto r = canon::canonicalize_document(
      std::vector<Triplet>{Triplet::make("A", "birthDate", "1923"), Triplet::make("A", "mission", "X")},
      {{"birthDate", "born"}, {"mission", "took part"}}, state, cfg, "t", *s.gateway,
      *s.embedder);
  EXPECT_EQ(r.llm_calls, 0);
  EXPECT_EQ(static_cast<ScriptedLlm&>(*s.chat).calls(), 0);
  for (const auto& a : r.actions) EXPECT_EQ(a.kind, ActionKind::Aligned);
}

TEST(Canon, ShortCircuitCanBeDisabled) {
  const Corpus c = alan_shepard();
  Stack s = scripted(c);
  auto state = canon::build_target_index(c.target, *s.embedder);
  canon::CanonConfig cfg;
  cfg.exact_match_shortcut = false;
  const auto r = canon::canonicalize_triplet(Triplet::make("A", "mission", "X"), "took part",
                                             state, cfg, "t", *s.gateway, *s.embedder);
  EXPECT_EQ(r.llm_calls, 1);
  EXPECT_EQ(r.action, CanonicalizationAction::aligned("mission", "mission"));
}

TEST(Canon, AmbiguousAnswerTreatedAsNone) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string&) { return llm::Completion{"A or B", false}; });
  auto state = canon::build_target_index(c.target, *s.embedder);
  canon::CanonConfig cfg;
  const auto r = canon::canonicalize_triplet(Triplet::make("A", "bornOn", "B"), "born", state,
                                             cfg, "t", *s.gateway, *s.embedder);
  EXPECT_EQ(r.action.kind, ActionKind::Dropped);
  EXPECT_EQ(r.warnings.mcq_ambiguous, 2);
  EXPECT_EQ(r.llm_calls, 2);
}

TEST(Canon, MissingDefinitionIsAnError) {
  const Corpus c = alan_shepard();
  Stack s = scripted(c);
  auto state = canon::build_target_index(c.target, *s.embedder);
  EXPECT_THROW(canon::canonicalize_document(std::vector<Triplet>{Triplet::make("A", "x", "B")}, {}, state,
                                            canon::CanonConfig{}, "t", *s.gateway, *s.embedder),
               InvariantError);
}

TEST(Canon, ModeStrings) {
  EXPECT_EQ(canon::canon_mode_from_string("self"), canon::CanonMode::SelfCanonicalization);
  EXPECT_EQ(canon::canon_mode_from_string(canon::to_string(canon::CanonMode::TargetAlignment)),
            canon::CanonMode::TargetAlignment);
  EXPECT_THROW(canon::canon_mode_from_string("other"), std::invalid_argument);
}

// ---- hints ----

TEST(BuildHint, ShepardCandidates) {
  const Corpus c = alan_shepard();
  Stack s = scripted(c);
  ExtractionRecord prev;
  prev.document_id = "shepard";
  prev.canonical_triplets = {Triplet::make("Alan Shepard", "birthDate", "Nov 18, 1923"),
                             Triplet::make("Alan Shepard", "mission", "Apollo 14")};
  const auto idx = embedding::build_schema_index(c.target, *s.retriever,
                                                 embedding::IndexMode::TextRelevance);
  const auto h = refine::build_hint(prev, shepard_text(c), c.target, &idx, oie_config(c),
                                    *s.gateway, *s.retriever, 10);
  std::vector<std::string> names;
  for (const auto& r : h.hint.candidate_relations()) names.push_back(r.name);
  ASSERT_GE(names.size(), 3u);
  EXPECT_EQ(names[0], "birthDate");
  EXPECT_EQ(names[1], "mission");
  EXPECT_THAT(names, Contains("selectedByNasa"));
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), names.size());
  for (const auto& r : h.hint.candidate_relations()) {
    EXPECT_EQ(r.definition, std::optional<std::string>(c.target.definition_of(r.name)));
  }
  const auto& ents = h.hint.candidate_entities();
  EXPECT_EQ(ents.front(), "Alan Shepard");
  EXPECT_THAT(ents, Contains("NASA"));
  EXPECT_EQ(std::set<std::string>(ents.begin(), ents.end()).size(), ents.size());
}

TEST(BuildHint, EmptySourcesGiveEmptyHint) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string&) { return llm::Completion{"[]", false}; });
  const auto h = refine::build_hint(ExtractionRecord{}, "t", Schema{}, nullptr, oie_config(c),
                                    *s.gateway, *s.retriever, 10);
  EXPECT_TRUE(h.hint.empty());
}

TEST(BuildHint, DefinitionFallsBackToPreviousRecord) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string&) { return llm::Completion{"[]", false}; });
  ExtractionRecord prev;
  prev.canonical_triplets = {Triplet::make("A", "novel", "B")};
  prev.definitions = {{"novel", "A novel relation."}};
  const auto h = refine::build_hint(prev, "t", Schema{}, nullptr, oie_config(c), *s.gateway,
                                    *s.retriever, 10);
  ASSERT_EQ(h.hint.candidate_relations().size(), 1u);
  EXPECT_EQ(h.hint.candidate_relations()[0].definition,
            std::optional<std::string>("A novel relation."));
}

TEST(BuildHint, EntityFailureDegrades) {
  const Corpus c = alan_shepard();
  Stack s = lambda([](const std::string&) -> llm::Completion {
    throw TransportError("down", false);
  });
  ExtractionRecord prev;
  prev.canonical_triplets = {Triplet::make("A", "r", "B")};
  const auto h = refine::build_hint(prev, "t", Schema{}, nullptr, oie_config(c), *s.gateway,
                                    *s.retriever, 10);
  EXPECT_EQ(h.hint.candidate_entities(), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(h.warnings.backend_failures, 1);
}

// ---- orchestration ----

TEST(RunEdc, EmptyDocuments) {
  const Corpus c = alan_shepard();
  Stack s = scripted(c);
  const auto r = refine::run_edc({}, pipeline_config(c, canon::CanonMode::TargetAlignment, 0),
                                 s.backends(), c.target);
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.final_schema, c.target);
}

TEST(RunEdc, TargetModeRequiresSchema) {
  const Corpus c = alan_shepard();
  Stack s = scripted(c);
  EXPECT_THROW(refine::run_edc(c.docs, pipeline_config(c, canon::CanonMode::TargetAlignment, 0),
                               s.backends(), Schema{}),
               InvariantError);
}

TEST(RunEdc, RejectsDuplicateIds) {
  const Corpus c = alan_shepard();
  Stack s = scripted(c);
  std::vector<Document> docs = {c.docs[0], c.docs[0]};
  EXPECT_THROW(refine::run_edc(docs, pipeline_config(c, canon::CanonMode::TargetAlignment, 0),
                               s.backends(), c.target),
               InvariantError);
}

TEST(RunEdc, ShepardBasePass) {
  const Corpus c = alan_shepard();
  Stack s = scripted(c);
  const auto r = refine::run_edc(
      c.docs, pipeline_config(c, canon::CanonMode::TargetAlignment, 0), s.backends(), c.target);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].iteration, 0);
  EXPECT_EQ(r.records[0].canonical_triplets,
            (std::vector<Triplet>{Triplet::make("Alan Shepard", "birthDate", "Nov 18, 1923"),
                                  Triplet::make("Alan Shepard", "mission", "Apollo 14")}));
}

TEST(RunEdcR, ShepardRefinementRecoversSelection) {
  const Corpus c = alan_shepard();
  Stack s = scripted(c);
  const auto r = refine::run_edc_r(
      c.docs, pipeline_config(c, canon::CanonMode::TargetAlignment, 1), s.backends(), c.target);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[1].iteration, 1);
  EXPECT_THAT(r.records[1].canonical_triplets,
              Contains(Triplet::make("Alan Shepard", "selectedByNasa", "1959")));
  const auto finals = refine::final_records(r.records);
  ASSERT_EQ(finals.size(), 1u);
  EXPECT_EQ(finals[0].iteration, 1);
}

TEST(RunEdcR, ZeroIterationsEqualsBasePass) {
  const Corpus c = synonym_corpus(6, 3);
  Stack a = scripted(c), b = scripted(c);
  const auto cfg = pipeline_config(c, canon::CanonMode::TargetAlignment, 0);
  const auto x = refine::run_edc(c.docs, cfg, a.backends(), c.target);
  const auto y = refine::run_edc_r(c.docs, cfg, b.backends(), c.target);
  EXPECT_EQ(x.records, y.records);
  EXPECT_EQ(x.final_schema, y.final_schema);
}

TEST(RunEdcR, RecordCountAndOrder) {
  const Corpus c = synonym_corpus(5, 4);
  for (auto mode : {canon::CanonMode::TargetAlignment, canon::CanonMode::SelfCanonicalization}) {
    Stack s = scripted(c);
    const auto r = refine::run_edc_r(c.docs, pipeline_config(c, mode, 2), s.backends(),
                                     mode == canon::CanonMode::TargetAlignment ? c.target
                                                                               : Schema{});
    ASSERT_EQ(r.records.size(), c.docs.size() * 3);
    for (std::size_t i = 0; i < r.records.size(); ++i) {
      EXPECT_EQ(r.records[i].iteration, static_cast<int>(i / c.docs.size()));
      EXPECT_EQ(r.records[i].document_id, c.docs[i % c.docs.size()].id);
    }
  }
}

TEST(RunEdcR, StableOutputsReachFixedPoint) {
  const Corpus c = synonym_corpus(8, 5);
  Stack s = scripted(c);
  const auto r = refine::run_edc_r(
      c.docs, pipeline_config(c, canon::CanonMode::TargetAlignment, 2), s.backends(), c.target);
  const std::size_t n = c.docs.size();
  for (std::size_t i = 0; i < n; ++i) {
    ExtractionRecord one = r.records[n + i], two = r.records[2 * n + i];
    one.iteration = two.iteration = 0;
    EXPECT_EQ(one, two) << c.docs[i].id;
  }
}

TEST(RunEdcR, TargetOutputsStayInSchema) {
  const Corpus c = synonym_corpus(10, 8, true);
  Stack s = scripted(c);
  const auto r = refine::run_edc_r(
      c.docs, pipeline_config(c, canon::CanonMode::TargetAlignment, 1), s.backends(), c.target);
  for (const auto& rec : r.records) {
    int dropped = 0;
    for (const auto& a : rec.actions) dropped += a.kind == ActionKind::Dropped;
    EXPECT_EQ(rec.canonical_triplets.size() + dropped, rec.oie_triplets.size());
    for (const auto& t : rec.canonical_triplets) EXPECT_TRUE(c.target.contains(t.relation));
    EXPECT_EQ(apply_actions(rec.oie_triplets, rec.actions), rec.canonical_triplets);
  }
}

TEST(RunEdcR, SelfModeContractsSynonyms) {
  const Corpus c = synonym_corpus(20, 6);
  Stack s = scripted(c);
  const auto r = refine::run_edc(
      c.docs, pipeline_config(c, canon::CanonMode::SelfCanonicalization, 0), s.backends());
  std::set<std::string> open;
  for (const auto& rec : r.records) {
    for (const auto& t : rec.oie_triplets) open.insert(t.relation);
    for (const auto& a : rec.actions) EXPECT_NE(a.kind, ActionKind::Dropped);
    for (const auto& t : rec.canonical_triplets) {
      EXPECT_TRUE(r.final_schema.contains(t.relation));
    }
  }
  EXPECT_LT(r.final_schema.size(), open.size());
  EXPECT_EQ(r.final_schema.size(), 3u);  // one per cluster
}

TEST(RunEdcR, CombinedModeMatchesTwoStepOnBasePass) {
  const Corpus c = alan_shepard();
  Stack a = scripted(c), b = scripted(c);
  auto cfg = pipeline_config(c, canon::CanonMode::TargetAlignment, 0);
  const auto two_step = refine::run_edc(c.docs, cfg, a.backends(), c.target);
  cfg.oie.combined_mode = true;
  const auto combined = refine::run_edc(c.docs, cfg, b.backends(), c.target);
  EXPECT_EQ(two_step.records[0].canonical_triplets, combined.records[0].canonical_triplets);
  EXPECT_EQ(two_step.records[0].definitions, combined.records[0].definitions);
}

TEST(RunEdcR, TransportFailureDowngradesDocument) {
  const Corpus c = synonym_corpus(4, 9);
  const std::string victim = c.docs[1].text;
  auto scripted_llm = std::make_shared<ScriptedLlm>(c.world);
  // Refined extraction for one document always fails.
  auto flaky = std::make_shared<LambdaLlm>([&](const std::string& p) -> llm::Completion {
    if (p.find(victim + "\n") != std::string::npos &&
        p.find("potential relations") != std::string::npos) {
      throw TransportError("gone", false, 400);
    }
    llm::ChatRequest req;
    req.messages.push_back({llm::Role::User, p});
    return scripted_llm->complete(req);
  });
  Stack s = make_stack(flaky, std::make_shared<HashingEmbedder>());
  const auto r = refine::run_edc_r(
      c.docs, pipeline_config(c, canon::CanonMode::TargetAlignment, 1), s.backends(), c.target);
  ASSERT_EQ(r.records.size(), 8u);
  ExtractionRecord base = r.records[1], refined = r.records[5];
  EXPECT_EQ(refined.iteration, 1);
  EXPECT_EQ(refined.document_id, c.docs[1].id);
  EXPECT_EQ(refined.canonical_triplets, base.canonical_triplets);
  EXPECT_EQ(refined.oie_triplets, base.oie_triplets);
  EXPECT_GE(refined.warnings.backend_failures, 1);
  EXPECT_GE(r.warnings.backend_failures, 1);
  // The other documents still refined normally.
  EXPECT_GT(r.records[4].canonical_triplets.size(), r.records[0].canonical_triplets.size());
}

TEST(RunEdcR, UnresolvedReplayIsFatal) {
  const Corpus c = alan_shepard();
  const auto dir = testing::temp_dir("pipe_unresolved");
  Stack s = testing::replay_stack(dir);
  EXPECT_THROW(refine::run_edc(c.docs, pipeline_config(c, canon::CanonMode::SelfCanonicalization, 0),
                               s.backends()),
               UnresolvedReplayError);
}

TEST(RunEdcR, ConfigValidation) {
  const Corpus c = alan_shepard();
  auto cfg = pipeline_config(c, canon::CanonMode::TargetAlignment, -1);
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.iterations = 1;
  cfg.retrieval_k = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.retrieval_k = 10;
  cfg.canon.candidate_k = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace edc
