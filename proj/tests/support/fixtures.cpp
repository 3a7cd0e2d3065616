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

#include "fixtures.hpp"

#include "edc/io.hpp"

namespace edc::testing {

namespace fs = std::filesystem;

void write_corpus_inputs(const Corpus& corpus, const fs::path& dir) {
  fs::create_directories(dir);
  io::write_dataset(dir / "dataset.jsonl", corpus.docs);
  io::save_schema(dir / "schema.json", corpus.target);
  io::write_few_shot(dir / "few_shot.jsonl", corpus.few_shot);
}

refine::PipelineConfig cli_defaults(const Corpus& corpus, canon::CanonMode mode,
                                    int iterations) {
  refine::PipelineConfig cfg;
  cfg.mode = mode;
  cfg.iterations = iterations;
  cfg.oie.few_shot = corpus.few_shot;
  return cfg;
}

refine::PipelineResult record_run(const Corpus& corpus, const refine::PipelineConfig& cfg,
                                  const fs::path& replay_dir) {
  fs::create_directories(replay_dir);
  Stack stack = recording_stack(corpus.world, replay_dir);
  const Schema seed =
      cfg.mode == canon::CanonMode::TargetAlignment ? corpus.target : Schema{};
  return refine::run_edc_r(corpus.docs, cfg, stack.backends(), seed);
}

std::vector<std::string> run_args(const fs::path& inputs, const fs::path& replay,
                                  const fs::path& out, const std::string& mode,
                                  int iterations) {
  std::vector<std::string> args = {"run",
                                   "--data", (inputs / "dataset.jsonl").string(),
                                   "--few-shot", (inputs / "few_shot.jsonl").string(),
                                   "--mode", mode,
                                   "--iterations", std::to_string(iterations),
                                   "--replay", replay.string(),
                                   "--out", out.string()};
  if (mode == "target") {
    args.push_back("--schema");
    args.push_back((inputs / "schema.json").string());
  }
  return args;
}

std::string slurp(const fs::path& path) { return io::read_text(path); }

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

}  // namespace edc::testing
