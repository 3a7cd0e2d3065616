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

#include "edc/llm/gateway.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "edc/digest.hpp"

namespace edc::llm {

using nlohmann::json;

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System:
      return "system";
    case Role::User:
      return "user";
    case Role::Assistant:
      return "assistant";
  }
  return "user";
}

void ChatRequest::validate() const {
  if (messages.empty()) throw std::invalid_argument("chat request has no messages");
  if (temperature < 0.0) throw std::invalid_argument("negative temperature");
  if (max_output_tokens <= 0) {
    throw std::invalid_argument("max_output_tokens must be positive");
  }
  bool first_turn_seen = false;
  for (const auto& m : messages) {
    if (m.role != Role::System && m.content.empty()) {
      throw std::invalid_argument("empty user/assistant message");
    }
    if (!first_turn_seen && m.role != Role::System) {
      if (m.role != Role::User) {
        throw std::invalid_argument("first non-system message must be a user turn");
      }
      first_turn_seen = true;
    }
  }
  if (!first_turn_seen) throw std::invalid_argument("chat request has no user turn");
}

std::string rendered_prompt(const ChatRequest& request) {
  if (request.messages.size() == 1 && request.messages[0].role == Role::User) {
    return request.messages[0].content;
  }
  std::string out;
  for (const auto& m : request.messages) {
    out += "<|";
    out += to_string(m.role);
    out += "|>\n";
    out += m.content;
    out += "\n";
  }
  return out;
}

std::string prompt_digest(const ChatRequest& request) {
  return sha256_hex(rendered_prompt(request));
}

Completion HttpChatBackend::complete(const ChatRequest& request) {
  json body;
  body["model"] = cfg_.model.empty() ? request.model_tag : cfg_.model;
  body["messages"] = json::array();
  for (const auto& m : request.messages) {
    body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_output_tokens;

  const HttpReply reply = post_json(cfg_, body.dump());
  check_http_status(reply);
  try {
    const json parsed = json::parse(reply.body);
    const json& choice = parsed.at("choices").at(0);
    Completion c;
    const json& content = choice.at("message").at("content");
    c.text = content.is_null() ? std::string() : content.get<std::string>();
    c.truncated = choice.value("finish_reason", json()) == "length";
    return c;
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed chat-completion response: ") + e.what(),
                         false, reply.status);
  }
}

std::string HttpChatBackend::describe() const {
  return "http:" + cfg_.url + (cfg_.model.empty() ? "" : "#" + cfg_.model);
}

Completion ReplayChatBackend::complete(const ChatRequest& request) {
  const std::string digest = prompt_digest(request);
  std::ifstream in(dir_ / (digest + ".txt"), std::ios::binary);
  if (!in) throw UnresolvedReplayError(digest);
  std::ostringstream ss;
  ss << in.rdbuf();
  log_.add(digest);
  return {ss.str(), false};
}

std::string ReplayChatBackend::describe() const {
  return "replay";
}

RecordingChatBackend::RecordingChatBackend(std::shared_ptr<ChatBackend> inner,
                                           std::filesystem::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {}

Completion RecordingChatBackend::complete(const ChatRequest& request) {
  Completion c = inner_->complete(request);
  write_file_atomic(dir_ / (prompt_digest(request) + ".txt"), c.text);
  return c;
}

std::string RecordingChatBackend::describe() const {
  return "record:" + dir_.string() + "<-" + inner_->describe();
}

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options)
    : backend_(std::move(backend)),
      options_(std::move(options)),
      limiter_(options_.max_in_flight) {
  if (!backend_) throw std::invalid_argument("gateway requires a backend");
}

Completion Gateway::complete(const ChatRequest& request) {
  request.validate();
  requests_.fetch_add(1);
  auto slot = limiter_.acquire();
  Completion c = with_retries(
      options_.retry, [&] { return backend_->complete(request); }, &retries_);
  if (c.truncated) truncated_.fetch_add(1);
  return c;
}

Completion Gateway::complete_prompt(std::string prompt) {
  ChatRequest request;
  request.messages.push_back({Role::User, std::move(prompt)});
  request.temperature = options_.temperature;
  request.max_output_tokens = options_.max_output_tokens;
  request.model_tag = options_.model_tag;
  return complete(request);
}

GatewayStats Gateway::stats() const {
  return {requests_.load(), retries_.load(), truncated_.load()};
}

}  // namespace edc::llm
