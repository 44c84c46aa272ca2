// Copyright 2026 The tfgrpo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tfgrpo/core_model.hpp"
#include "tfgrpo/error.hpp"

namespace tfgrpo {

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_output_tokens = 4096;
  // Metering category: "rollout", "summary", "extract", "optimize", "judge", ...
  std::string request_tag;
};

struct ChatResponse {
  std::string content;
  TokenUsage usage;
  std::string model_name;
};

/// Raised by backends for faults worth retrying: transport failures, HTTP 5xx
/// and rate limiting. Anything else propagates as a plain Error.
class TransientError : public Error {
 public:
  explicit TransientError(const std::string& message) : Error(ErrorCode::gateway_error, message) {}
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse send(const ChatRequest& request) = 0;
};

/// Deterministic usage proxy shared by the offline backends: whitespace token
/// counts of the concatenated message contents and of the reply.
TokenUsage proxy_usage(const ChatRequest& request, std::string_view reply);

struct ScriptEntry {
  std::optional<std::string> tag;
  std::string content;
};

/// Replays a fixed script. A request takes the first unconsumed entry whose tag
/// equals its request_tag or whose tag is null.
class MockBackend : public ChatBackend {
 public:
  explicit MockBackend(std::vector<ScriptEntry> script);
  static std::shared_ptr<MockBackend> from_file(const std::filesystem::path& path);
  static std::vector<ScriptEntry> parse_script(std::string_view json_text);

  ChatResponse send(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mu_;
  std::vector<ScriptEntry> script_;
  std::vector<bool> consumed_;
  std::vector<ChatRequest> log_;
};

/// Computes each reply with a callable; used to script policies whose output
/// depends on the prompt (for instance on library contents).
class FunctionBackend : public ChatBackend {
 public:
  using Responder = std::function<std::string(const ChatRequest&)>;
  explicit FunctionBackend(Responder responder) : responder_(std::move(responder)) {}

  ChatResponse send(const ChatRequest& request) override;
  std::vector<ChatRequest> requests() const;

 private:
  Responder responder_;
  mutable std::mutex mu_;
  std::vector<ChatRequest> log_;
};

struct HttpBackendOptions {
  std::string base_url;  // e.g. https://api.deepseek.com/v1
  std::string api_key;
  std::string model;
  std::chrono::seconds timeout{600};
};

/// Chat-completions client for an OpenAI-compatible endpoint. Reads base URL
/// and key from TFGRPO_API_BASE / TFGRPO_API_KEY when not given explicitly.
class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpBackendOptions options);
  static HttpBackendOptions options_from_env(std::string model);

  ChatResponse send(const ChatRequest& request) override;

  static std::string encode_request(const ChatRequest& request, const std::string& model);
  static ChatResponse decode_response(std::string_view body, const std::string& model);

 private:
  HttpBackendOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
};

struct PricingTable {
  double input_price_per_1m = 0.0;
  double cached_input_price_per_1m = 0.0;
  double output_price_per_1m = 0.0;

  bool valid() const {
    return input_price_per_1m >= 0 && cached_input_price_per_1m >= 0 && output_price_per_1m >= 0;
  }
};

double estimate_cost(const TokenUsage& usage, const PricingTable& pricing);

struct UsageReport {
  std::map<std::string, TokenUsage> by_tag;
  TokenUsage total;
};

struct CallRecord {
  std::string request_tag;
  TokenUsage usage;
  int attempts = 0;
  bool succeeded = false;
};

/// Sole egress to the model. Retries transient faults with exponential
/// backoff and meters usage per request tag; safe for concurrent callers.
class Gateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit Gateway(std::shared_ptr<ChatBackend> backend, RetryPolicy policy = {},
                   Sleeper sleeper = {});

  ChatResponse complete(const ChatRequest& request);

  UsageReport usage_report() const;
  TokenUsage total_usage() const;
  std::vector<CallRecord> call_log() const;
  int total_retries() const;

 private:
  std::shared_ptr<ChatBackend> backend_;
  RetryPolicy policy_;
  Sleeper sleeper_;
  mutable std::mutex mu_;
  UsageReport report_;
  std::vector<CallRecord> log_;
};

}  // namespace tfgrpo
