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

#include "edc/evaluate.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>
#include <stdexcept>

namespace edc::eval {
namespace {

bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

using Tokens = std::vector<std::string>;

ElementJudgment judge_tokens(const Tokens& c, const Tokens& r) {
  if (c == r) return ElementJudgment::Correct;
  for (const auto& t : c) {
    if (std::find(r.begin(), r.end(), t) != r.end()) return ElementJudgment::PartialMatch;
  }
  return ElementJudgment::Incorrect;
}

double credit(ElementJudgment j, MatchCriterion criterion) {
  if (j == ElementJudgment::Correct) return 1.0;
  if (j == ElementJudgment::PartialMatch && criterion == MatchCriterion::Partial) {
    return 0.5;
  }
  return 0.0;
}

using TokenTriplet = std::array<Tokens, 3>;

TokenTriplet tokenize(const Triplet& t) {
  return {tokenize_element(t.subject), tokenize_element(t.relation),
          tokenize_element(t.object)};
}

// Reference slot -> candidate slot.
using SlotMap = std::array<int, 3>;

struct PairMatch {
  double score = 0.0;
  SlotMap slots{0, 1, 2};
};

PairMatch best_pair(const TokenTriplet& c, const TokenTriplet& r, MatchCriterion criterion) {
  SlotMap perm{0, 1, 2};
  PairMatch best;
  best.score = -1.0;
  do {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += credit(judge_tokens(c[perm[i]], r[i]), criterion);
    if (s > best.score) best = {s, perm};
    if (criterion == MatchCriterion::Strict) break;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Maximum-weight assignment of rows to distinct columns, rows <= cols.
// Returns the column of each row.
std::vector<std::size_t> assign(const std::vector<std::vector<double>>& w,
                                std::size_t rows, std::size_t cols) {
  // Hungarian algorithm (potentials form) on cost = -w, 1-indexed.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> p(cols + 1, 0), way(cols + 1, 0);
  for (std::size_t i = 1; i <= rows; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = -w[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

double ratio(double num, double den, const char* what, std::vector<std::string>& warnings) {
  if (den == 0.0) {
    warnings.push_back(std::string("zero ") + what + " elements; reporting 0");
    return 0.0;
  }
  return num / den;
}

}  // namespace

std::string_view to_string(MatchCriterion c) {
  switch (c) {
    case MatchCriterion::Exact: return "exact";
    case MatchCriterion::Partial: return "partial";
    case MatchCriterion::Strict: return "strict";
  }
  return "?";
}

MatchCriterion criterion_from_string(std::string_view s) {
  for (auto c : kAllCriteria) {
    if (to_string(c) == s) return c;
  }
  throw std::invalid_argument("unknown match criterion: " + std::string(s));
}

std::string_view to_string(ElementJudgment j) {
  switch (j) {
    case ElementJudgment::Correct: return "correct";
    case ElementJudgment::PartialMatch: return "partial_match";
    case ElementJudgment::Incorrect: return "incorrect";
    case ElementJudgment::Missed: return "missed";
    case ElementJudgment::Spurious: return "spurious";
  }
  return "?";
}

std::vector<std::string> tokenize_element(std::string_view element) {
  std::string spaced;
  spaced.reserve(element.size() + 8);
  for (std::size_t i = 0; i < element.size(); ++i) {
    const char c = element[i];
    if (c == '_') {
      spaced.push_back(' ');
      continue;
    }
    if (i > 0 && is_upper(c)) {
      const char prev = element[i - 1];
      const bool next_lower = i + 1 < element.size() && is_lower(element[i + 1]);
      // fooBar, foo2Bar, and the last capital of an acronym run (NASAMission).
      if (is_lower(prev) || is_digit(prev) || (is_upper(prev) && next_lower)) {
        spaced.push_back(' ');
      }
    }
    spaced.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }

  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < spaced.size()) {
    while (i < spaced.size() && std::isspace(static_cast<unsigned char>(spaced[i]))) ++i;
    std::size_t j = i;
    while (j < spaced.size() && !std::isspace(static_cast<unsigned char>(spaced[j]))) ++j;
    std::size_t b = i, e = j;
    while (b < e && is_punct(spaced[b])) ++b;
    while (e > b && is_punct(spaced[e - 1])) --e;
    if (b < e) tokens.emplace_back(spaced.substr(b, e - b));
    i = j;
  }
  return tokens;
}

ElementJudgment judge_elements(std::string_view candidate, std::string_view reference) {
  return judge_tokens(tokenize_element(candidate), tokenize_element(reference));
}

double triplet_pair_score(const Triplet& candidate, const Triplet& reference,
                          MatchCriterion criterion) {
  return best_pair(tokenize(candidate), tokenize(reference), criterion).score;
}

DocumentScore score_document(std::span<const Triplet> candidates,
                             std::span<const Triplet> references,
                             MatchCriterion criterion) {
  DocumentScore out;
  out.n_candidate_elems = static_cast<int>(3 * candidates.size());
  out.n_reference_elems = static_cast<int>(3 * references.size());

  std::vector<TokenTriplet> ct, rt;
  for (const auto& t : candidates) ct.push_back(tokenize(t));
  for (const auto& t : references) rt.push_back(tokenize(t));

  const std::size_t nc = ct.size(), nr = rt.size();
  std::vector<std::vector<PairMatch>> m(nc, std::vector<PairMatch>(nr));
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = 0; j < nr; ++j) m[i][j] = best_pair(ct[i], rt[j], criterion);
  }

  if (nc > 0 && nr > 0) {
    const bool by_candidate = nc <= nr;
    const std::size_t rows = by_candidate ? nc : nr;
    const std::size_t cols = by_candidate ? nr : nc;
    std::vector<std::vector<double>> w(rows, std::vector<double>(cols));
    for (std::size_t a = 0; a < rows; ++a) {
      for (std::size_t b = 0; b < cols; ++b) {
        w[a][b] = by_candidate ? m[a][b].score : m[b][a].score;
      }
    }
    const auto cols_of = assign(w, rows, cols);
    for (std::size_t a = 0; a < rows; ++a) {
      out.alignment.emplace_back(by_candidate ? a : cols_of[a],
                                 by_candidate ? cols_of[a] : a);
    }
    std::sort(out.alignment.begin(), out.alignment.end());
  }

  std::vector<bool> c_used(nc, false), r_used(nr, false);
  for (auto [ci, ri] : out.alignment) {
    c_used[ci] = r_used[ri] = true;
    const PairMatch& pm = m[ci][ri];
    out.weighted_correct += pm.score;
    for (int s = 0; s < 3; ++s) {
      ++out.judgments[judge_tokens(ct[ci][pm.slots[s]], rt[ri][s])];
    }
  }
  for (std::size_t i = 0; i < nc; ++i) {
    if (!c_used[i]) out.judgments[ElementJudgment::Spurious] += 3;
  }
  for (std::size_t j = 0; j < nr; ++j) {
    if (!r_used[j]) out.judgments[ElementJudgment::Missed] += 3;
  }
  return out;
}

Aggregate aggregate(std::span<const DocumentScore> scores) {
  Aggregate out;
  if (scores.empty()) out.warnings.push_back("no documents to aggregate");
  double weighted = 0.0, n_cand = 0.0, n_ref = 0.0;
  for (const auto& s : scores) {
    weighted += s.weighted_correct;
    n_cand += s.n_candidate_elems;
    n_ref += s.n_reference_elems;
  }
  out.prf.precision = ratio(weighted, n_cand, "candidate", out.warnings);
  out.prf.recall = ratio(weighted, n_ref, "reference", out.warnings);
  const double sum = out.prf.precision + out.prf.recall;
  out.prf.f1 = sum == 0.0 ? 0.0 : 2.0 * out.prf.precision * out.prf.recall / sum;
  return out;
}

double redundancy_score(const embedding::VectorIndex& index) {
  const auto& vecs = index.vectors();
  const std::size_t n = vecs.size();
  if (n <= 1) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) best = std::max(best, embedding::cosine(vecs[i], vecs[j]));
    }
    total += best;
  }
  return total / static_cast<double>(n);
}

SchemaStats schema_stats(const Schema& schema, std::span<const ExtractionRecord> records) {
  SchemaStats out;
  out.schema_size = schema.size();
  if (records.empty()) return out;
  std::size_t total = 0;
  for (const auto& r : records) total += r.canonical_triplets.size();
  out.avg_triplets_per_sentence =
      static_cast<double>(total) / static_cast<double>(records.size());
  return out;
}

EvalReport evaluate_pairs(std::span<const ScoredPair> pairs,
                          std::span<const MatchCriterion> criteria) {
  EvalReport report;
  std::set<std::string> seen;
  for (auto c : criteria) {
    if (!seen.insert(std::string(to_string(c))).second) continue;
    std::vector<DocumentScore> scores;
    scores.reserve(pairs.size());
    for (const auto& p : pairs) {
      scores.push_back(score_document(p.candidates, p.references, c));
    }
    auto agg = aggregate(scores);
    for (auto& w : agg.warnings) {
      report.warnings.push_back(std::string(to_string(c)) + ": " + w);
    }
    report.criteria[c] = agg.prf;
  }
  if (!pairs.empty()) {
    std::size_t total = 0;
    for (const auto& p : pairs) total += p.candidates.size();
    report.avg_triplets_per_sentence =
        static_cast<double>(total) / static_cast<double>(pairs.size());
  }
  return report;
}

}  // namespace edc::eval
