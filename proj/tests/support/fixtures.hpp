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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "edc/refine.hpp"

namespace edc::testing {

/// dataset.jsonl, schema.json and few_shot.jsonl for `corpus` in `dir`.
void write_corpus_inputs(const Corpus& corpus, const std::filesystem::path& dir);

/// Runs the pipeline against the scripted model with recording on, leaving
/// the replay fixtures in `replay_dir`.
refine::PipelineResult record_run(const Corpus& corpus, const refine::PipelineConfig& cfg,
                                  const std::filesystem::path& replay_dir);

/// Pipeline settings matching `edc run` defaults with the given mode.
refine::PipelineConfig cli_defaults(const Corpus& corpus, canon::CanonMode mode,
                                    int iterations);

/// Argument list for `edc run` over inputs written by write_corpus_inputs.
std::vector<std::string> run_args(const std::filesystem::path& inputs,
                                  const std::filesystem::path& replay,
                                  const std::filesystem::path& out, const std::string& mode,
                                  int iterations);

/// Contents of every regular file under `dir`, keyed by relative path.
std::map<std::string, std::string> snapshot(const std::filesystem::path& dir);

std::string slurp(const std::filesystem::path& path);

}  // namespace edc::testing
