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

#include "edc/embedding/client.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "edc/core_model.hpp"
#include "edc/digest.hpp"

namespace edc::embedding {

using nlohmann::json;

RetrievalInstruction::RetrievalInstruction(std::string_view tmpl)
    : template_(tmpl) {
  const auto first = template_.find("{t}");
  if (first == std::string::npos ||
      template_.find("{t}", first + 1) != std::string::npos) {
    throw std::invalid_argument(
        "retrieval instruction must contain {t} exactly once");
  }
}

std::string RetrievalInstruction::apply(std::string_view text) const {
  std::string out = template_;
  out.replace(out.find("{t}"), 3, text);
  return out;
}

std::vector<std::vector<double>> HttpEmbeddingBackend::embed(
    std::span<const std::string> texts) {
  json body;
  body["model"] = cfg_.model;
  body["input"] = json::array();
  for (const auto& t : texts) body["input"].push_back(t);

  const HttpReply reply = post_json(cfg_, body.dump());
  check_http_status(reply);
  std::vector<std::vector<double>> out;
  try {
    const json parsed = json::parse(reply.body);
    const json& rows = parsed.is_array() ? parsed : parsed.at("data");
    for (const auto& row : rows) {
      const json& values = row.is_array() ? row : row.at("embedding");
      out.push_back(values.get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed embedding response: ") + e.what(),
                         false, reply.status);
  }
  if (out.size() != texts.size()) {
    throw TransportError("embedding response has " + std::to_string(out.size()) +
                             " vectors for " + std::to_string(texts.size()) +
                             " inputs",
                         false, reply.status);
  }
  return out;
}

std::string HttpEmbeddingBackend::describe() const {
  return "http:" + cfg_.url + (cfg_.model.empty() ? "" : "#" + cfg_.model);
}

std::string format_vec_file(std::span<const double> values) {
  std::string out;
  char buf[32];
  for (double v : values) {
    const int n = std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

std::vector<double> parse_vec_file(std::string_view content) {
  std::vector<double> out;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size()) throw std::invalid_argument("bad vector entry: " + t);
    out.push_back(v);
  }
  return out;
}

std::vector<std::vector<double>> ReplayEmbeddingBackend::embed(
    std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    const std::string digest = sha256_hex(t);
    std::ifstream in(dir_ / (digest + ".vec"), std::ios::binary);
    if (!in) throw UnresolvedReplayError(digest);
    std::ostringstream ss;
    ss << in.rdbuf();
    out.push_back(parse_vec_file(ss.str()));
    log_.add(digest);
  }
  return out;
}

std::string ReplayEmbeddingBackend::describe() const {
  return "replay";
}

std::vector<std::vector<double>> RecordingEmbeddingBackend::embed(
    std::span<const std::string> texts) {
  auto out = inner_->embed(texts);
  for (std::size_t i = 0; i < texts.size() && i < out.size(); ++i) {
    write_file_atomic(dir_ / (sha256_hex(texts[i]) + ".vec"),
                      format_vec_file(out[i]));
  }
  return out;
}

std::string RecordingEmbeddingBackend::describe() const {
  return "record:" + dir_.string() + "<-" + inner_->describe();
}

EmbeddingClient::EmbeddingClient(std::shared_ptr<EmbeddingBackend> backend,
                                 EmbeddingOptions options)
    : backend_(std::move(backend)),
      options_(options),
      limiter_(options.max_in_flight) {
  if (!backend_) throw std::invalid_argument("embedding client requires a backend");
  if (options_.batch_size == 0) options_.batch_size = 1;
}

std::vector<EmbeddingVector> EmbeddingClient::embed(
    std::span<const std::string> texts,
    const std::optional<RetrievalInstruction>& instruction) {
  if (texts.empty()) throw std::invalid_argument("embed: no input texts");

  std::vector<std::string> wrapped;
  wrapped.reserve(texts.size());
  for (const auto& t : texts) {
    wrapped.push_back(instruction ? instruction->apply(t) : t);
  }

  std::vector<std::string> pending;
  {
    std::lock_guard lock(mu_);
    for (const auto& w : wrapped) {
      if (!cache_.contains(w) &&
          std::find(pending.begin(), pending.end(), w) == pending.end()) {
        pending.push_back(w);
      }
    }
  }

  for (std::size_t start = 0; start < pending.size(); start += options_.batch_size) {
    const std::size_t n = std::min(options_.batch_size, pending.size() - start);
    std::span<const std::string> batch(pending.data() + start, n);
    std::vector<std::vector<double>> raw;
    {
      auto slot = limiter_.acquire();
      calls_.fetch_add(1);
      raw = with_retries(options_.retry, [&] { return backend_->embed(batch); },
                         &retries_);
    }
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < n; ++i) {
      EmbeddingVector v(std::move(raw.at(i)));
      if (dim_ == 0) dim_ = v.dim();
      if (v.dim() != dim_) {
        throw DimensionMismatchError("embedding dimension changed from " +
                                     std::to_string(dim_) + " to " +
                                     std::to_string(v.dim()));
      }
      cache_.try_emplace(batch[i], std::move(v));
    }
  }

  std::vector<EmbeddingVector> out;
  out.reserve(wrapped.size());
  std::lock_guard lock(mu_);
  for (const auto& w : wrapped) out.push_back(cache_.find(w)->second);
  return out;
}

EmbeddingVector EmbeddingClient::embed_one(
    std::string_view text, const std::optional<RetrievalInstruction>& instruction) {
  const std::string t(text);
  return embed(std::span<const std::string>(&t, 1), instruction).front();
}

}  // namespace edc::embedding
