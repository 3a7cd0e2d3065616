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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "edc/digest.hpp"
#include "edc/embedding/client.hpp"
#include "edc/embedding/index.hpp"
#include "edc/embedding/retrieval.hpp"
#include "support/fakes.hpp"

namespace edc::embedding {
namespace {

using edc::testing::HashingEmbedder;
using edc::testing::temp_dir;

EmbeddingVector vec(std::vector<double> v) { return EmbeddingVector(std::move(v)); }

EmbeddingVector random_vec(std::mt19937& rng, std::size_t dim) {
  std::normal_distribution<double> nd;
  std::vector<double> v(dim);
  for (auto& x : v) x = nd(rng);
  return EmbeddingVector(std::move(v));
}

// Full sort of all cosines; stable so insertion order breaks ties.
std::vector<std::string> brute_force_top(const VectorIndex& index, const EmbeddingVector& q,
                                         std::size_t k) {
  std::vector<std::size_t> order(index.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> scores(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    double dot = 0.0;
    for (std::size_t d = 0; d < q.dim(); ++d) {
      dot += q.values()[d] * index.vectors()[i].values()[d];
    }
    scores[i] = dot;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) {
    out.push_back(index.keys()[order[i]]);
  }
  return out;
}

TEST(EmbeddingVector, NormalizesToUnitLength) {
  const auto v = vec({3, 4});
  EXPECT_NEAR(v.values()[0], 0.6, 1e-12);
  EXPECT_NEAR(v.values()[1], 0.8, 1e-12);
  EXPECT_THROW(vec({0, 0}), std::invalid_argument);
  EXPECT_THROW(vec({}), std::invalid_argument);
  EXPECT_THROW(vec({1, NAN}), std::invalid_argument);
}

TEST(Cosine, HandExamples) {
  EXPECT_NEAR(cosine(vec({1, 0}), vec({0.6, 0.8})), 0.6, 1e-12);
  EXPECT_NEAR(cosine(vec({1, 2, 3}), vec({1, 2, 3})), 1.0, 1e-12);
  EXPECT_NEAR(cosine(vec({1, 0}), vec({0, 1})), 0.0, 1e-12);
  EXPECT_THROW(cosine(vec({1, 0}), vec({1, 0, 0})), DimensionMismatchError);
}

TEST(Cosine, SymmetricAndBounded) {
  std::mt19937 rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_vec(rng, 16), b = random_vec(rng, 16);
    EXPECT_NEAR(cosine(a, b), cosine(b, a), 1e-9);
    EXPECT_LE(cosine(a, b), 1.0);
    EXPECT_GE(cosine(a, b), -1.0);
  }
}

TEST(VectorIndex, RejectsDuplicatesAndDimensionChanges) {
  VectorIndex idx;
  idx.add("a", vec({1, 0}));
  EXPECT_THROW(idx.add("a", vec({0, 1})), std::invalid_argument);
  EXPECT_THROW(idx.add("b", vec({1, 0, 0})), DimensionMismatchError);
  EXPECT_EQ(idx.size(), 1u);
}

TEST(TopK, TieBreaksByInsertionOrder) {
  VectorIndex idx;
  idx.add("late", vec({0, 1}));
  idx.add("first", vec({1, 0}));
  idx.add("second", vec({1, 0}));
  const auto hits = top_k(idx, vec({1, 0}), 3);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].key, "first");
  EXPECT_EQ(hits[1].key, "second");
  EXPECT_EQ(hits[2].key, "late");
}

TEST(TopK, KLargerThanIndex) {
  VectorIndex idx;
  idx.add("a", vec({1, 0}));
  idx.add("b", vec({0.6, 0.8}));
  const auto hits = top_k(idx, vec({0, 1}), 10);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].key, "b");
  EXPECT_NEAR(hits[0].score, 0.8, 1e-12);
}

TEST(TopK, Preconditions) {
  VectorIndex idx;
  EXPECT_THROW(top_k(idx, vec({1, 0}), 1), std::invalid_argument);
  idx.add("only", vec({1, 0}));
  EXPECT_THROW(top_k(idx, vec({1, 0}), 0), std::invalid_argument);
  EXPECT_EQ(top_k(idx, vec({0, 1}), 1).at(0).key, "only");
}

TEST(TopK, MatchesBruteForceWithTies) {
  std::mt19937 rng(21);
  VectorIndex idx;
  // Every fifth entry repeats an earlier vector so ties are common.
  std::vector<EmbeddingVector> pool;
  for (int i = 0; i < 300; ++i) {
    EmbeddingVector v = (i % 5 == 4) ? pool[rng() % pool.size()] : random_vec(rng, 8);
    pool.push_back(v);
    idx.add("k" + std::to_string(i), v);
  }
  for (int q = 0; q < 40; ++q) {
    const auto query = (q % 2) ? pool[rng() % pool.size()] : random_vec(rng, 8);
    const std::size_t k = 1 + rng() % 40;
    std::vector<std::string> got;
    for (const auto& h : top_k(idx, query, k)) got.push_back(h.key);
    EXPECT_EQ(got, brute_force_top(idx, query, k));
  }
}

TEST(RetrievalInstruction, WrapsQueryText) {
  const RetrievalInstruction ins;
  const std::string wrapped = ins.apply("Alan Shepard was born on Nov 18, 1923.");
  EXPECT_EQ(wrapped.rfind("Instruct: retrieve relations that are present", 0), 0u);
  EXPECT_NE(wrapped.find("Query: Alan Shepard was born"), std::string::npos);
  EXPECT_THROW(RetrievalInstruction("no placeholder"), std::invalid_argument);
  EXPECT_THROW(RetrievalInstruction("{t} and {t}"), std::invalid_argument);
}

class RecordingBackend : public EmbeddingBackend {
 public:
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override {
    std::lock_guard lock(mu_);
    std::vector<std::vector<double>> out;
    for (const auto& t : texts) {
      seen.push_back(t);
      out.push_back({1.0, static_cast<double>(t.size())});
    }
    return out;
  }
  std::string describe() const override { return "rec"; }
  std::vector<std::string> seen;

 private:
  std::mutex mu_;
};

TEST(EmbeddingClient, InstructionAppliedOnlyWhenGiven) {
  auto backend = std::make_shared<RecordingBackend>();
  EmbeddingClient client(backend);
  client.embed_one("plain text");
  client.embed_one("query text", RetrievalInstruction());
  ASSERT_EQ(backend->seen.size(), 2u);
  EXPECT_EQ(backend->seen[0], "plain text");
  EXPECT_EQ(backend->seen[1], RetrievalInstruction().apply("query text"));
}

TEST(EmbeddingClient, CachesAndPreservesOrder) {
  auto backend = std::make_shared<RecordingBackend>();
  EmbeddingClient client(backend);
  const std::vector<std::string> texts = {"a", "bbb", "a", "cc"};
  const auto out = client.embed(texts);
  ASSERT_EQ(out.size(), 4u);
  EXPECT_EQ(out[0], out[2]);
  EXPECT_EQ(backend->seen, (std::vector<std::string>{"a", "bbb", "cc"}));
  client.embed(texts);
  EXPECT_EQ(backend->seen.size(), 3u);
  for (const auto& v : out) {
    double sq = 0.0;
    for (double x : v.values()) sq += x * x;
    EXPECT_NEAR(sq, 1.0, 1e-9);
  }
  EXPECT_THROW(client.embed(std::vector<std::string>{}), std::invalid_argument);
}

class ShiftingBackend : public EmbeddingBackend {
 public:
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < texts.size(); ++i) out.push_back(std::vector<double>(dim++, 1.0));
    return out;
  }
  std::string describe() const override { return "shifting"; }
  std::size_t dim = 2;
};

TEST(EmbeddingClient, DimensionChangeIsFatal) {
  EmbeddingClient client(std::make_shared<ShiftingBackend>());
  client.embed_one("first");
  EXPECT_THROW(client.embed_one("second"), DimensionMismatchError);
}

TEST(EmbeddingReplay, VecFilesRoundTrip) {
  const auto dir = temp_dir("emb_replay");
  auto rec = std::make_shared<RecordingEmbeddingBackend>(std::make_shared<HashingEmbedder>(32),
                                                         dir);
  EmbeddingClient recording(rec);
  const auto a = recording.embed_one("Alan Shepard was born on Nov 18, 1923.");
  EXPECT_TRUE(std::filesystem::exists(
      dir / (sha256_hex("Alan Shepard was born on Nov 18, 1923.") + ".vec")));
  auto replay = std::make_shared<ReplayEmbeddingBackend>(dir);
  EmbeddingClient replaying(replay);
  EXPECT_EQ(replaying.embed_one("Alan Shepard was born on Nov 18, 1923."), a);
  EXPECT_THROW(replaying.embed_one("not recorded"), UnresolvedReplayError);
  EXPECT_EQ(replay->describe(), "replay");
}

TEST(EmbeddingReplay, VecFormat) {
  const std::vector<double> v = {0.1, -2.5, 1e-300, 3.0};
  EXPECT_EQ(parse_vec_file(format_vec_file(v)), v);
  EXPECT_THROW(parse_vec_file("1.0\nabc\n"), std::invalid_argument);
}

TEST(InfoNce, HandValues) {
  const std::vector<double> a = {0.1, 0.1};
  EXPECT_NEAR(info_nce_loss(0.8, a), 0.223144, 1e-6);
  const std::vector<double> b = {0.5};
  EXPECT_NEAR(info_nce_loss(0.5, b), 0.693147, 1e-6);
  const std::vector<double> zeros = {0.0, 0.0};
  EXPECT_DOUBLE_EQ(info_nce_loss(0.3, zeros), 0.0);
  // Negative similarities are clamped.
  const std::vector<double> neg = {-0.7};
  EXPECT_DOUBLE_EQ(info_nce_loss(0.3, neg), 0.0);
}

TEST(InfoNce, DomainErrors) {
  const std::vector<double> none;
  EXPECT_THROW(info_nce_loss(0.0, none), std::domain_error);
  EXPECT_THROW(info_nce_loss(-0.2, none), std::domain_error);
  const std::vector<double> bad = {NAN};
  EXPECT_THROW(info_nce_loss(0.5, bad), std::domain_error);
}

TEST(InfoNce, Monotonicity) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> pos(0.01, 1.0), neg(-1.0, 1.0), step(0.0, 0.5);
  for (int i = 0; i < 1000; ++i) {
    const double p = pos(rng);
    std::vector<double> negs(1 + rng() % 5);
    for (auto& n : negs) n = neg(rng);
    const double base = info_nce_loss(p, negs);
    auto bumped = negs;
    bumped[rng() % bumped.size()] += step(rng);
    EXPECT_GE(info_nce_loss(p, bumped), base - 1e-12);
    EXPECT_LE(info_nce_loss(p + step(rng), negs), base + 1e-12);
  }
}

TEST(Recall, HandMean) {
  VectorIndex idx(IndexMode::TextRelevance);
  idx.add("r1", vec({1, 0, 0}));
  idx.add("r2", vec({0, 1, 0}));
  idx.add("r3", vec({0, 0, 1}));
  const std::vector<RecallQuery> qs = {
      {vec({1, 0.1, 0}), {"r1"}},          // hit
      {vec({0, 1, 0.1}), {"r2", "r1"}},    // one of two
      {vec({0, 0.1, 1}), {"r1"}},          // miss at k=1
  };
  EXPECT_NEAR(recall_at_k(qs, idx, 1), 0.5, 1e-12);
  EXPECT_NEAR(recall_at_k(qs, idx, 3), 1.0, 1e-12);
}

TEST(Recall, GoldOutsideIndexIsFatal) {
  VectorIndex idx;
  idx.add("r1", vec({1, 0}));
  const std::vector<RecallQuery> qs = {{vec({1, 0}), {"nope"}}};
  EXPECT_THROW(recall_at_k(qs, idx, 1), SchemaMismatchError);
  EXPECT_THROW(recall_at_k(std::span<const RecallQuery>(), idx, 1), std::invalid_argument);
}

TEST(Recall, NondecreasingInK) {
  std::mt19937 rng(17);
  VectorIndex idx;
  for (int i = 0; i < 30; ++i) idx.add("r" + std::to_string(i), random_vec(rng, 6));
  std::vector<RecallQuery> qs;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::string> gold;
    for (int g = 0; g < 1 + static_cast<int>(rng() % 3); ++g) {
      gold.push_back("r" + std::to_string(rng() % 30));
    }
    qs.push_back({random_vec(rng, 6), gold});
  }
  double prev = 0.0;
  for (std::size_t k = 1; k <= 30; ++k) {
    const double r = recall_at_k(qs, idx, k);
    EXPECT_GE(r, prev - 1e-12);
    prev = r;
  }
  EXPECT_NEAR(prev, 1.0, 1e-12);
}

TEST(SchemaIndex, EntryTextUsesDefinitionWhenKnown) {
  EXPECT_EQ(relation_entry_text("birthDate", "born on"), "birthDate: born on");
  EXPECT_EQ(relation_entry_text("birthDate", ""), "birthDate");
}

// Inputs avoid tokens that share a hash bucket in the fake embedder.
TEST(SchemaIndex, RetrieveRelationsRanksRelevantFirst) {
  Schema s;
  s.add("birthDate", "The subject entity was born on the date given by the object entity.");
  s.add("employer", "The subject entity works for the organisation given by the object.");
  s.add("almaMater", "The subject entity studied at the school given by the object.");
  EmbeddingClient client(std::make_shared<HashingEmbedder>());
  const VectorIndex idx = build_schema_index(s, client, IndexMode::TextRelevance);
  EXPECT_EQ(idx.keys(), s.names());
  EXPECT_EQ(idx.mode(), IndexMode::TextRelevance);
  const auto hits = retrieve_relations("Jane Roe was born in May 1970.", idx, client, 2);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].key, "birthDate");
  EXPECT_THROW(retrieve_relations("x", VectorIndex(), client), std::invalid_argument);
}

}  // namespace
}  // namespace edc::embedding
