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


// Python surface: scoring, parsing, vector search and the command runner.
// Triplets cross the boundary as (subject, relation, object) tuples.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "commands.hpp"
#include "edc/embedding/retrieval.hpp"
#include "edc/evaluate.hpp"
#include "edc/llm/parse.hpp"

namespace py = pybind11;
using namespace edc;

namespace {

using TripletTuple = std::tuple<std::string, std::string, std::string>;

std::vector<Triplet> to_triplets(const std::vector<TripletTuple>& in) {
  std::vector<Triplet> out;
  out.reserve(in.size());
  for (const auto& [s, r, o] : in) out.push_back(Triplet::make(s, r, o));
  return out;
}

std::vector<TripletTuple> to_tuples(const std::vector<Triplet>& in) {
  std::vector<TripletTuple> out;
  out.reserve(in.size());
  for (const auto& t : in) out.emplace_back(t.subject, t.relation, t.object);
  return out;
}

embedding::VectorIndex make_index(const std::vector<std::string>& keys,
                                  const std::vector<std::vector<double>>& vectors) {
  if (keys.size() != vectors.size()) throw std::invalid_argument("keys and vectors differ in length");
  embedding::VectorIndex index;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    index.add(keys[i], embedding::EmbeddingVector(vectors[i]));
  }
  return index;
}

py::dict score(const std::vector<TripletTuple>& candidates,
               const std::vector<TripletTuple>& references, const std::string& criterion) {
  const auto c = eval::criterion_from_string(criterion);
  const auto d = eval::score_document(to_triplets(candidates), to_triplets(references), c);
  const std::vector<eval::DocumentScore> one = {d};
  const auto prf = eval::aggregate(one).prf;
  py::dict out;
  out["weighted_correct"] = d.weighted_correct;
  out["precision"] = prf.precision;
  out["recall"] = prf.recall;
  out["f1"] = prf.f1;
  out["alignment"] = d.alignment;
  return out;
}

py::dict evaluate(const std::vector<std::pair<std::vector<TripletTuple>, std::vector<TripletTuple>>>& docs) {
  std::vector<eval::ScoredPair> pairs;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    pairs.push_back({std::to_string(i), to_triplets(docs[i].first), to_triplets(docs[i].second)});
  }
  const auto report = eval::evaluate_pairs(pairs);
  py::dict out;
  for (const auto& [c, p] : report.criteria) {
    py::dict d;
    d["precision"] = p.precision;
    d["recall"] = p.recall;
    d["f1"] = p.f1;
    out[py::str(std::string(eval::to_string(c)))] = d;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_edc, m) {
  m.doc() = "Native core of the edc knowledge-graph toolkit";

  m.def("normalize_relation", &normalize_relation);
  m.def("tokenize_element", &eval::tokenize_element);
  m.def(
      "parse_triplets",
      [](const std::string& text) {
        auto parsed = llm::parse_triplet_list(text);
        return py::make_tuple(to_tuples(parsed.value), parsed.warnings);
      },
      "Triplets found in a model reply, plus parse warnings.");
  m.def("score", &score, py::arg("candidates"), py::arg("references"),
        py::arg("criterion") = "partial");
  m.def("evaluate", &evaluate, "Micro-averaged P/R/F1 per criterion over (candidates, references) pairs.");
  m.def(
      "top_k",
      [](const std::vector<std::string>& keys, const std::vector<std::vector<double>>& vectors,
         const std::vector<double>& query, std::size_t k) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& h : embedding::top_k(make_index(keys, vectors),
                                              embedding::EmbeddingVector(query), k)) {
          out.emplace_back(h.key, h.score);
        }
        return out;
      },
      py::arg("keys"), py::arg("vectors"), py::arg("query"), py::arg("k"));
  m.def(
      "redundancy_score",
      [](const std::vector<std::vector<double>>& vectors) {
        std::vector<std::string> keys;
        for (std::size_t i = 0; i < vectors.size(); ++i) keys.push_back(std::to_string(i));
        return eval::redundancy_score(make_index(keys, vectors));
      },
      py::arg("vectors"));
  m.def(
      "info_nce_loss",
      [](double positive, const std::vector<double>& negatives) {
        return embedding::info_nce_loss(positive, negatives);
      },
      py::arg("positive"), py::arg("negatives"));
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      "Runs an edc subcommand; returns (exit_code, stdout, stderr).");
}
