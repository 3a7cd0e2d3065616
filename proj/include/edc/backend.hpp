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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <semaphore>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

// Transport plumbing shared by the chat and embedding clients: error types,
// HTTP endpoint configuration, retry with backoff, and the in-flight bound.

namespace edc {

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A failed request. Retryable errors (connection failures, 429, 5xx) are
/// retried by the clients with exponential backoff.
class TransportError : public BackendError {
 public:
  TransportError(const std::string& what, bool retryable, int status = 0)
      : BackendError(what), retryable_(retryable), status_(status) {}
  bool retryable() const { return retryable_; }
  int status() const { return status_; }

 private:
  bool retryable_;
  int status_;
};

/// Replay mode was asked for something no fixture answers. Always fatal.
class UnresolvedReplayError : public BackendError {
 public:
  explicit UnresolvedReplayError(const std::string& digest)
      : BackendError("unresolved replay request: " + digest), digest_(digest) {}
  const std::string& digest() const { return digest_; }

 private:
  std::string digest_;
};

struct HttpEndpointConfig {
  std::string url;          // full endpoint URL, http:// or https://
  std::string model;
  std::string api_key_env;  // name of the variable holding the bearer token
  std::chrono::milliseconds timeout{std::chrono::seconds(120)};
};

struct HttpReply {
  int status = 0;
  std::string body;
};

/// POSTs a JSON body. Connection-level failures throw a retryable
/// TransportError; HTTP status handling is left to the caller.
HttpReply post_json(const HttpEndpointConfig& cfg, const std::string& body);

/// Throws TransportError for non-2xx replies (retryable for 429 and 5xx).
void check_http_status(const HttpReply& reply);

struct RetryPolicy {
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};
};

template <typename F>
auto with_retries(const RetryPolicy& policy, F&& attempt,
                  std::atomic<int>* retry_counter = nullptr) {
  auto backoff = policy.initial_backoff;
  for (int tries = 0;; ++tries) {
    try {
      return attempt();
    } catch (const TransportError& e) {
      if (!e.retryable() || tries >= policy.max_retries) throw;
    }
    if (retry_counter) retry_counter->fetch_add(1);
    std::this_thread::sleep_for(backoff);
    backoff = std::min(
        policy.max_backoff,
        std::chrono::milliseconds(static_cast<long long>(
            static_cast<double>(backoff.count()) * policy.multiplier)));
  }
}

/// Bounds the number of concurrent requests issued through a client.
class InFlightLimiter {
 public:
  static constexpr std::ptrdiff_t kMax = 1024;

  explicit InFlightLimiter(std::ptrdiff_t max_in_flight)
      : sem_(std::clamp<std::ptrdiff_t>(max_in_flight, 1, kMax)) {}

  class Slot {
   public:
    explicit Slot(InFlightLimiter& l) : l_(l) { l_.sem_.acquire(); }
    ~Slot() { l_.sem_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    InFlightLimiter& l_;
  };

  Slot acquire() { return Slot(*this); }

 private:
  std::counting_semaphore<kMax> sem_;
};

/// Thread-safe set of fixture digests touched during a run.
class DigestLog {
 public:
  void add(const std::string& digest) {
    std::lock_guard lock(mu_);
    digests_.insert(digest);
  }
  std::vector<std::string> sorted() const {
    std::lock_guard lock(mu_);
    return {digests_.begin(), digests_.end()};
  }

 private:
  mutable std::mutex mu_;
  std::set<std::string> digests_;
};

/// Writes `content` to `path` atomically enough for fixture recording
/// (temporary file + rename).
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace edc
