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

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edc/backend.hpp"
#include "edc/embedding/index.hpp"

namespace edc::embedding {

inline constexpr std::string_view kRetrievalInstruction =
    "Instruct: retrieve relations that are present in the given text \n Query: {t}";

/// Query-side wrapper for the schema retriever. The template must contain
/// `{t}` exactly once.
class RetrievalInstruction {
 public:
  RetrievalInstruction() : RetrievalInstruction(kRetrievalInstruction) {}
  explicit RetrievalInstruction(std::string_view tmpl);

  std::string apply(std::string_view text) const;
  const std::string& text() const { return template_; }

 private:
  std::string template_;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  /// One attempt; one raw vector per input, in order. Thread-safe.
  virtual std::vector<std::vector<double>> embed(
      std::span<const std::string> texts) = 0;
  virtual std::string describe() const = 0;
};

/// JSON embedding endpoint: {model, input:[...]} in; either a bare array of
/// float arrays or {"data":[{"embedding":[...]}, ...]} out.
class HttpEmbeddingBackend : public EmbeddingBackend {
 public:
  explicit HttpEmbeddingBackend(HttpEndpointConfig cfg) : cfg_(std::move(cfg)) {}
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
  std::string describe() const override;

 private:
  HttpEndpointConfig cfg_;
};

/// Reads `<dir>/<sha256(text)>.vec`, newline-separated decimals.
class ReplayEmbeddingBackend : public EmbeddingBackend {
 public:
  explicit ReplayEmbeddingBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
  std::string describe() const override;
  std::vector<std::string> resolved_digests() const { return log_.sorted(); }

 private:
  std::filesystem::path dir_;
  DigestLog log_;
};

class RecordingEmbeddingBackend : public EmbeddingBackend {
 public:
  RecordingEmbeddingBackend(std::shared_ptr<EmbeddingBackend> inner,
                            std::filesystem::path dir)
      : inner_(std::move(inner)), dir_(std::move(dir)) {}
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
  std::string describe() const override;

 private:
  std::shared_ptr<EmbeddingBackend> inner_;
  std::filesystem::path dir_;
};

std::string format_vec_file(std::span<const double> values);
std::vector<double> parse_vec_file(std::string_view content);

struct EmbeddingOptions {
  RetryPolicy retry;
  int max_in_flight = 4;
  std::size_t batch_size = 32;
};

/// Normalizing, caching front end over an EmbeddingBackend. Every vector it
/// returns has the same dimension; a backend that changes dimension mid-run
/// raises DimensionMismatchError.
class EmbeddingClient {
 public:
  explicit EmbeddingClient(std::shared_ptr<EmbeddingBackend> backend,
                           EmbeddingOptions options = {});

  /// Throws std::invalid_argument on an empty input list.
  std::vector<EmbeddingVector> embed(
      std::span<const std::string> texts,
      const std::optional<RetrievalInstruction>& instruction = std::nullopt);
  EmbeddingVector embed_one(
      std::string_view text,
      const std::optional<RetrievalInstruction>& instruction = std::nullopt);

  const EmbeddingBackend& backend() const { return *backend_; }
  int backend_calls() const { return calls_.load(); }

 private:
  std::shared_ptr<EmbeddingBackend> backend_;
  EmbeddingOptions options_;
  InFlightLimiter limiter_;
  std::atomic<int> calls_{0};
  std::atomic<int> retries_{0};
  mutable std::mutex mu_;
  std::map<std::string, EmbeddingVector, std::less<>> cache_;
  std::size_t dim_ = 0;
};

}  // namespace edc::embedding
