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

#include "commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <thread>

#include "edc/backend.hpp"
#include "edc/canonicalize.hpp"
#include "edc/digest.hpp"
#include "edc/embedding/client.hpp"
#include "edc/embedding/retrieval.hpp"
#include "edc/evaluate.hpp"
#include "edc/io.hpp"
#include "edc/llm/gateway.hpp"
#include "edc/refine.hpp"
#include "edc/schema_define.hpp"

namespace edc::cli {
namespace {

namespace fs = std::filesystem;
using io::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BackendFlags {
  std::string replay;
  std::string record;
  std::string llm_url;
  std::string llm_model;
  std::string llm_key_env = "EDC_LLM_API_KEY";
  std::string embed_url;
  std::string embed_model;
  std::string embed_key_env = "EDC_EMBED_API_KEY";
  std::string retriever_url;
  std::string retriever_model;
  int timeout_s = 120;
  int max_in_flight = 4;
};

void add_backend_flags(CLI::App* app, BackendFlags& f, bool with_llm) {
  auto* replay = app->add_option("--replay", f.replay, "Answer every request from fixtures in DIR");
  auto* record = app->add_option("--record", f.record, "Store live answers as fixtures in DIR");
  replay->excludes(record);
  if (with_llm) {
    app->add_option("--llm-url", f.llm_url, "Chat completion endpoint URL");
    app->add_option("--llm-model", f.llm_model, "Chat model name");
    app->add_option("--llm-key-env", f.llm_key_env, "Variable holding the chat API key");
  }
  app->add_option("--embed-url", f.embed_url, "Embedding endpoint URL");
  app->add_option("--embed-model", f.embed_model, "Embedding model name");
  app->add_option("--embed-key-env", f.embed_key_env, "Variable holding the embedding API key");
  app->add_option("--retriever-url", f.retriever_url, "Schema retriever endpoint (defaults to --embed-url)");
  app->add_option("--retriever-model", f.retriever_model, "Schema retriever model");
  app->add_option("--timeout", f.timeout_s, "HTTP timeout in seconds")->check(CLI::PositiveNumber);
  app->add_option("--max-in-flight", f.max_in_flight, "Concurrent requests per backend")
      ->check(CLI::Range(1, 1024));
}

bool replaying(const BackendFlags& f) { return !f.replay.empty(); }

std::shared_ptr<llm::ChatBackend> chat_backend(const BackendFlags& f) {
  if (replaying(f)) return std::make_shared<llm::ReplayChatBackend>(f.replay);
  if (f.llm_url.empty()) throw UsageError("a chat backend is required: pass --replay or --llm-url");
  std::shared_ptr<llm::ChatBackend> live = std::make_shared<llm::HttpChatBackend>(
      HttpEndpointConfig{f.llm_url, f.llm_model, f.llm_key_env, std::chrono::seconds(f.timeout_s)});
  if (!f.record.empty()) return std::make_shared<llm::RecordingChatBackend>(live, f.record);
  return live;
}

// nullptr when neither replay nor a URL is configured and `required` is false.
std::shared_ptr<embedding::EmbeddingBackend> embed_backend(const BackendFlags& f, bool retriever,
                                                           bool required) {
  if (replaying(f)) return std::make_shared<embedding::ReplayEmbeddingBackend>(f.replay);
  std::string url = f.embed_url, model = f.embed_model;
  if (retriever && !f.retriever_url.empty()) {
    url = f.retriever_url;
    model = f.retriever_model.empty() ? model : f.retriever_model;
  }
  if (url.empty()) {
    if (!required) return nullptr;
    throw UsageError("an embedding backend is required: pass --replay or --embed-url");
  }
  std::shared_ptr<embedding::EmbeddingBackend> live = std::make_shared<embedding::HttpEmbeddingBackend>(
      HttpEndpointConfig{url, model, f.embed_key_env, std::chrono::seconds(f.timeout_s)});
  if (!f.record.empty()) {
    return std::make_shared<embedding::RecordingEmbeddingBackend>(live, f.record);
  }
  return live;
}

struct Services {
  std::shared_ptr<llm::ChatBackend> chat;
  std::shared_ptr<embedding::EmbeddingBackend> embed;
  std::shared_ptr<embedding::EmbeddingBackend> retrieve;
  std::unique_ptr<llm::Gateway> gateway;
  std::unique_ptr<embedding::EmbeddingClient> embedder;
  std::unique_ptr<embedding::EmbeddingClient> retriever;

  refine::Backends backends() { return {*gateway, *embedder, *retriever}; }

  std::vector<std::string> fixture_digests() const {
    std::set<std::string> all;
    if (auto* r = dynamic_cast<const llm::ReplayChatBackend*>(chat.get())) {
      for (auto& d : r->resolved_digests()) all.insert(d);
    }
    for (const auto* e : {embed.get(), retrieve.get()}) {
      if (auto* r = dynamic_cast<const embedding::ReplayEmbeddingBackend*>(e)) {
        for (auto& d : r->resolved_digests()) all.insert(d);
      }
    }
    return {all.begin(), all.end()};
  }
};

Services make_services(const BackendFlags& f) {
  Services s;
  s.chat = chat_backend(f);
  s.embed = embed_backend(f, false, true);
  // Replay serves both roles from one directory, so one backend suffices.
  s.retrieve = replaying(f) ? s.embed : embed_backend(f, true, true);
  llm::GatewayOptions gopts;
  gopts.max_in_flight = f.max_in_flight;
  gopts.model_tag = f.llm_model;
  s.gateway = std::make_unique<llm::Gateway>(s.chat, gopts);
  embedding::EmbeddingOptions eopts;
  eopts.max_in_flight = f.max_in_flight;
  s.embedder = std::make_unique<embedding::EmbeddingClient>(s.embed, eopts);
  s.retriever = std::make_unique<embedding::EmbeddingClient>(s.retrieve, eopts);
  return s;
}

std::optional<std::string> now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

// Inputs are identified by file name and content digest, so manifests do not
// depend on where the run was started from.
ordered_json input_entry(const std::string& path) {
  if (path.empty()) return nullptr;
  return {{"file", fs::path(path).filename().string()},
          {"sha256", sha256_hex(io::read_text(path))}};
}

int default_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io::InputError(dir, 0, "cannot create output directory: " + ec.message());
}

// --- run -----------------------------------------------------------------

struct RunFlags {
  std::string data, few_shot, schema, out, mode = "target";
  int iterations = 1;
  int jobs = default_jobs();
  bool combined = false;
  std::size_t few_shot_count = llm::kDefaultFewShotCount;
  std::size_t candidate_k = canon::kDefaultCandidateK;
  std::size_t retrieval_k = embedding::kDefaultRetrievalK;
  BackendFlags backend;
};

void add_run_flags(CLI::App* run, RunFlags& f) {
  run->add_option("--data", f.data, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  run->add_option("--few-shot", f.few_shot, "Few-shot examples JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--mode", f.mode, "Canonicalization mode")->check(CLI::IsMember({"target", "self"}));
  run->add_option("--schema", f.schema, "Target (or seed) schema, JSON map or CSV")
      ->check(CLI::ExistingFile);
  run->add_option("--iterations", f.iterations, "Refinement rounds after the base pass")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--out", f.out, "Output directory")->required();
  run->add_option("--jobs", f.jobs, "Documents processed concurrently")->check(CLI::PositiveNumber);
  run->add_flag("--combined", f.combined, "Extract triplets and definitions in one prompt");
  run->add_option("--few-shot-count", f.few_shot_count, "Examples per prompt")->check(CLI::PositiveNumber);
  run->add_option("--candidate-k", f.candidate_k, "Canonicalization candidates")->check(CLI::PositiveNumber);
  run->add_option("--retrieval-k", f.retrieval_k, "Relations retrieved for hints")->check(CLI::PositiveNumber);
  add_backend_flags(run, f.backend, true);
}

ordered_json run_config_json(const RunFlags& f) {
  ordered_json c;
  c["command"] = "run";
  c["mode"] = f.mode;
  c["iterations"] = f.iterations;
  c["combined"] = f.combined;
  c["few_shot_count"] = f.few_shot_count;
  c["candidate_k"] = f.candidate_k;
  c["retrieval_k"] = f.retrieval_k;
  c["inputs"] = {{"data", input_entry(f.data)},
                 {"few_shot", input_entry(f.few_shot)},
                 {"schema", input_entry(f.schema)}};
  return c;
}

void write_run_outputs(const std::string& out_dir, std::span<const ExtractionRecord> records,
                       const Schema& schema, io::RunManifest manifest) {
  ensure_dir(out_dir);
  io::write_results(fs::path(out_dir) / "results.jsonl", records);
  io::save_schema(fs::path(out_dir) / "schema.json", schema);
  io::write_text(fs::path(out_dir) / "manifest.json", io::manifest_to_json(manifest).dump(2) + "\n");
}

int cmd_run(const RunFlags& f, std::ostream& out) {
  const auto mode = canon::canon_mode_from_string(f.mode);
  if (mode == canon::CanonMode::TargetAlignment && f.schema.empty()) {
    throw UsageError("--mode target requires --schema");
  }
  const auto docs = io::load_dataset(f.data);
  const Schema schema = f.schema.empty() ? Schema{} : io::load_schema(f.schema);
  refine::PipelineConfig cfg;
  cfg.mode = mode;
  cfg.iterations = f.iterations;
  cfg.retrieval_k = f.retrieval_k;
  cfg.jobs = f.jobs;
  cfg.canon.candidate_k = f.candidate_k;
  cfg.oie.few_shot_file = f.few_shot;
  cfg.oie.few_shot = io::load_few_shot(f.few_shot);
  cfg.oie.few_shot_count = f.few_shot_count;
  cfg.oie.combined_mode = f.combined;

  Services svc = make_services(f.backend);
  io::RunManifest manifest;
  const bool replay = replaying(f.backend);
  if (!replay) manifest.started_at = now_utc();
  const auto result = refine::run_edc_r(docs, cfg, svc.backends(), schema);
  if (!replay) manifest.finished_at = now_utc();

  manifest.config = run_config_json(f);
  manifest.backends = {{"llm", svc.chat->describe()},
                       {"embedder", svc.embed->describe()},
                       {"retriever", svc.retrieve->describe()}};
  manifest.fixture_digests = svc.fixture_digests();
  manifest.warnings = result.warnings;
  write_run_outputs(f.out, result.records, result.final_schema, std::move(manifest));

  out << "documents: " << docs.size() << "\n"
      << "records: " << result.records.size() << "\n"
      << "schema_size: " << result.final_schema.size() << "\n"
      << "warnings: " << result.warnings.total() << "\n";
  return kOk;
}

// --- evaluate --------------------------------------------------------------

struct EvalFlags {
  std::string results, references, criteria = "all", out, schema;
  BackendFlags backend;
};

// Candidate triplets by document id, from a results file (last iteration of
// each document) or a dataset file.
std::map<std::string, std::vector<Triplet>> load_candidates(const std::string& path) {
  std::map<std::string, std::vector<Triplet>> out;
  const std::string text = io::read_text(path);
  const auto first_line = text.substr(0, text.find('\n'));
  bool is_results = false;
  try {
    is_results = io::json::parse(first_line).contains("canonical_triplets");
  } catch (const std::exception&) {
    // let the dataset loader report the line
  }
  if (is_results) {
    for (auto& r : refine::final_records(io::load_results(path))) {
      out[r.document_id] = std::move(r.canonical_triplets);
    }
  } else {
    for (auto& d : io::load_dataset(path)) {
      out[d.id] = d.reference_triplets.value_or(std::vector<Triplet>{});
    }
  }
  return out;
}

int cmd_evaluate(const EvalFlags& f, std::ostream& out) {
  std::vector<eval::MatchCriterion> criteria;
  if (f.criteria == "all") {
    criteria.assign(eval::kAllCriteria.begin(), eval::kAllCriteria.end());
  } else {
    criteria.push_back(eval::criterion_from_string(f.criteria));
  }
  auto candidates = load_candidates(f.results);
  const auto refs = io::load_dataset(f.references);
  std::vector<eval::ScoredPair> pairs;
  std::vector<std::string> warnings;
  for (const auto& d : refs) {
    if (!d.reference_triplets) {
      throw io::InputError(f.references, 0, "document '" + d.id + "' has no reference triplets");
    }
    auto it = candidates.find(d.id);
    if (it == candidates.end()) warnings.push_back("no candidates for document '" + d.id + "'");
    pairs.push_back({d.id, it == candidates.end() ? std::vector<Triplet>{} : it->second,
                     *d.reference_triplets});
    if (it != candidates.end()) candidates.erase(it);
  }
  for (const auto& [id, _] : candidates) {
    warnings.push_back("candidate document '" + id + "' has no reference; ignored");
  }

  eval::EvalReport report = eval::evaluate_pairs(pairs, criteria);
  report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
  if (!f.schema.empty()) {
    const Schema schema = io::load_schema(f.schema);
    report.schema_size = schema.size();
    if (auto backend = embed_backend(f.backend, false, false); backend && !schema.empty()) {
      embedding::EmbeddingClient client(backend);
      report.redundancy = eval::redundancy_score(embedding::build_schema_index(
          schema, client, embedding::IndexMode::DefinitionSimilarity));
    }
  }
  out << io::format_report(report);
  if (!f.out.empty()) io::write_text(f.out, io::report_to_json(report).dump(2) + "\n");
  return kOk;
}

// --- retriever-eval ----------------------------------------------------------

struct RetrieverFlags {
  std::string data, schema;
  std::size_t k = embedding::kDefaultRetrievalK;
  BackendFlags backend;
};

int cmd_retriever_eval(const RetrieverFlags& f, std::ostream& out) {
  const auto docs = io::load_dataset(f.data);
  const Schema schema = io::load_schema(f.schema);
  if (schema.empty()) throw io::InputError(f.schema, 0, "schema is empty");
  std::vector<embedding::RecallPair> pairs;
  for (const auto& d : docs) {
    if (!d.reference_triplets || d.reference_triplets->empty()) continue;
    pairs.push_back({d.text, distinct_relations(*d.reference_triplets)});
  }
  if (pairs.empty()) throw io::InputError(f.data, 0, "no document has reference triplets");
  auto retrieve = embed_backend(f.backend, true, true);
  embedding::EmbeddingClient client(retrieve);
  const auto index =
      embedding::build_schema_index(schema, client, embedding::IndexMode::TextRelevance);
  const double recall = embedding::recall_at_k(pairs, index, client, f.k);
  char buf[64];
  std::snprintf(buf, sizeof buf, "recall@%zu: %.3f\n", f.k, recall);
  out << buf << "queries: " << pairs.size() << "\n";
  return kOk;
}

// --- canonicalize -------------------------------------------------------------

struct CanonFlags {
  std::string input, few_shot, schema, out, mode = "target";
  std::size_t candidate_k = canon::kDefaultCandidateK;
  BackendFlags backend;
};

int cmd_canonicalize(const CanonFlags& f, std::ostream& out) {
  const auto mode = canon::canon_mode_from_string(f.mode);
  if (mode == canon::CanonMode::TargetAlignment && f.schema.empty()) {
    throw UsageError("--mode target requires --schema");
  }
  const auto docs = io::load_open_triplets(f.input);
  const Schema schema = f.schema.empty() ? Schema{} : io::load_schema(f.schema);
  const auto few_shot =
      f.few_shot.empty() ? std::vector<prompts::FewShotRecord>{} : io::load_few_shot(f.few_shot);

  Services svc = make_services(f.backend);
  canon::CanonConfig cfg;
  cfg.mode = mode;
  cfg.candidate_k = f.candidate_k;
  auto state = mode == canon::CanonMode::SelfCanonicalization
                   ? canon::build_seed_state(schema, *svc.embedder)
                   : canon::build_target_index(schema, *svc.embedder);

  io::RunManifest manifest;
  const bool replay = replaying(f.backend);
  if (!replay) manifest.started_at = now_utc();
  std::vector<ExtractionRecord> records;
  for (const auto& d : docs) {
    ExtractionRecord r;
    r.document_id = d.id;
    r.oie_triplets = d.triplets;
    bool missing = false;
    for (const auto& rel : distinct_relations(d.triplets)) missing |= !d.definitions.contains(rel);
    auto defs = define::complete_definitions(d.text, d.triplets, d.definitions, few_shot,
                                             *svc.gateway, missing ? 2 : 0);
    r.definitions = std::move(defs.definitions);
    r.warnings += defs.warnings;
    auto canon = canon::canonicalize_document(d.triplets, r.definitions, state, cfg, d.text,
                                              *svc.gateway, *svc.embedder);
    r.canonical_triplets = std::move(canon.triplets);
    r.actions = std::move(canon.actions);
    r.warnings += canon.warnings;
    manifest.warnings += r.warnings;
    records.push_back(std::move(r));
  }
  if (!replay) manifest.finished_at = now_utc();

  ordered_json c;
  c["command"] = "canonicalize";
  c["mode"] = f.mode;
  c["candidate_k"] = f.candidate_k;
  c["inputs"] = {{"triplets", input_entry(f.input)},
                 {"few_shot", input_entry(f.few_shot)},
                 {"schema", input_entry(f.schema)}};
  manifest.config = c;
  manifest.backends = {{"llm", svc.chat->describe()}, {"embedder", svc.embed->describe()}};
  manifest.fixture_digests = svc.fixture_digests();
  write_run_outputs(f.out, records, state.schema(), std::move(manifest));
  out << "documents: " << docs.size() << "\n"
      << "schema_size: " << state.schema().size() << "\n";
  return kOk;
}

// --- config file -------------------------------------------------------------

// Expands `--config FILE` into `--key=value` arguments placed before the
// explicit ones, so flags given on the command line win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::vector<std::string> from_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    for (const auto& [k, v] : io::load_config(path)) from_file.push_back("--" + k + "=" + v);
  }
  if (from_file.empty() || rest.empty()) return rest;
  std::vector<std::string> out{rest.front()};  // subcommand name
  out.insert(out.end(), from_file.begin(), from_file.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Knowledge-graph construction: extract, define, canonicalize, refine"};
  app.name("edc");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  RunFlags run_flags;
  add_run_flags(app.add_subcommand("run", "Run the pipeline over a dataset"), run_flags);

  EvalFlags eval_flags;
  auto* evaluate = app.add_subcommand("evaluate", "Score results against references");
  evaluate->add_option("--results", eval_flags.results, "Results or dataset JSONL with candidates")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--references", eval_flags.references, "Dataset JSONL with references")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--criteria", eval_flags.criteria, "all, exact, partial or strict")
      ->check(CLI::IsMember({"all", "exact", "partial", "strict"}));
  evaluate->add_option("--out", eval_flags.out, "Write the JSON report here");
  evaluate->add_option("--schema", eval_flags.schema, "Schema for size and redundancy")
      ->check(CLI::ExistingFile);
  add_backend_flags(evaluate, eval_flags.backend, false);

  RetrieverFlags ret_flags;
  auto* retriever = app.add_subcommand("retriever-eval", "Recall@k of the schema retriever");
  retriever->add_option("--data", ret_flags.data, "Dataset JSONL with references")
      ->required()
      ->check(CLI::ExistingFile);
  retriever->add_option("--schema", ret_flags.schema, "Schema file")->required()->check(CLI::ExistingFile);
  retriever->add_option("--k", ret_flags.k, "Cutoff")->check(CLI::PositiveNumber);
  add_backend_flags(retriever, ret_flags.backend, false);

  CanonFlags canon_flags;
  auto* canonicalize = app.add_subcommand("canonicalize", "Define and canonicalize open triplets");
  canonicalize->add_option("--input", canon_flags.input, "Open triplets JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  canonicalize->add_option("--few-shot", canon_flags.few_shot, "Few-shot examples JSONL")
      ->check(CLI::ExistingFile);
  canonicalize->add_option("--mode", canon_flags.mode, "Canonicalization mode")
      ->check(CLI::IsMember({"target", "self"}));
  canonicalize->add_option("--schema", canon_flags.schema, "Target (or seed) schema")
      ->check(CLI::ExistingFile);
  canonicalize->add_option("--out", canon_flags.out, "Output directory")->required();
  canonicalize->add_option("--candidate-k", canon_flags.candidate_k, "Canonicalization candidates")
      ->check(CLI::PositiveNumber);
  add_backend_flags(canonicalize, canon_flags.backend, true);

  try {
    const auto args = expand_config(raw_args);
    std::vector<const char*> argv{"edc"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kUsage;
    }
    if (app.got_subcommand("run")) return cmd_run(run_flags, out);
    if (app.got_subcommand("evaluate")) return cmd_evaluate(eval_flags, out);
    if (app.got_subcommand("retriever-eval")) return cmd_retriever_eval(ret_flags, out);
    if (app.got_subcommand("canonicalize")) return cmd_canonicalize(canon_flags, out);
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const BackendError& e) {
    err << "backend failure: " << e.what() << "\n";
    return kBackendFailure;
  } catch (const std::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace edc::cli
