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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "edc/backend.hpp"

namespace edc::llm {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

struct ChatMessage {
  Role role = Role::User;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_output_tokens = 2048;
  std::string model_tag;

  /// Throws std::invalid_argument when the request breaks its invariants.
  void validate() const;
};

struct Completion {
  std::string text;
  bool truncated = false;  // backend stopped on its token limit
};

/// The exact string a replay digest is computed over. A lone user message is
/// its own content; longer conversations are rendered with role headers.
std::string rendered_prompt(const ChatRequest& request);
std::string prompt_digest(const ChatRequest& request);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  /// One attempt; no retries. Implementations must be thread-safe.
  virtual Completion complete(const ChatRequest& request) = 0;
  virtual std::string describe() const = 0;
};

/// JSON chat-completion endpoint: {model, messages, temperature, max_tokens}
/// in, first choice's message content out.
class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpEndpointConfig cfg) : cfg_(std::move(cfg)) {}
  Completion complete(const ChatRequest& request) override;
  std::string describe() const override;

 private:
  HttpEndpointConfig cfg_;
};

/// Answers from `<dir>/<digest>.txt`; a missing file is an
/// UnresolvedReplayError.
class ReplayChatBackend : public ChatBackend {
 public:
  explicit ReplayChatBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}
  Completion complete(const ChatRequest& request) override;
  std::string describe() const override;
  std::vector<std::string> resolved_digests() const { return log_.sorted(); }

 private:
  std::filesystem::path dir_;
  DigestLog log_;
};

/// Forwards to `inner` and stores every answer as a replay fixture.
class RecordingChatBackend : public ChatBackend {
 public:
  RecordingChatBackend(std::shared_ptr<ChatBackend> inner,
                       std::filesystem::path dir);
  Completion complete(const ChatRequest& request) override;
  std::string describe() const override;

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::filesystem::path dir_;
};

struct GatewayOptions {
  RetryPolicy retry;
  int max_in_flight = 4;
  double temperature = 0.0;
  int max_output_tokens = 2048;
  std::string model_tag;
};

struct GatewayStats {
  int requests = 0;
  int retries = 0;
  int truncated = 0;
};

/// Front door for every chat call in the pipeline: builds requests, bounds
/// concurrency, and retries transient transport errors.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<ChatBackend> backend,
                   GatewayOptions options = {});

  Completion complete(const ChatRequest& request);
  /// Sends `prompt` as a single user message with the gateway defaults.
  Completion complete_prompt(std::string prompt);

  GatewayStats stats() const;
  const ChatBackend& backend() const { return *backend_; }
  const GatewayOptions& options() const { return options_; }

 private:
  std::shared_ptr<ChatBackend> backend_;
  GatewayOptions options_;
  InFlightLimiter limiter_;
  std::atomic<int> requests_{0};
  std::atomic<int> retries_{0};
  std::atomic<int> truncated_{0};
};

}  // namespace edc::llm
