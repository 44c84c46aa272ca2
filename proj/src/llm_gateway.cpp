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

#include "tfgrpo/llm_gateway.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tfgrpo/text_util.hpp"

namespace tfgrpo {

using json = nlohmann::json;

TokenUsage proxy_usage(const ChatRequest& request, std::string_view reply) {
  TokenUsage usage;
  for (const auto& m : request.messages) {
    usage.input_tokens += static_cast<std::int64_t>(count_words(m.content));
  }
  usage.output_tokens = static_cast<std::int64_t>(count_words(reply));
  return usage;
}

// ---------------------------------------------------------------------------
// MockBackend

MockBackend::MockBackend(std::vector<ScriptEntry> script)
    : script_(std::move(script)), consumed_(script_.size(), false) {}

std::vector<ScriptEntry> MockBackend::parse_script(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config_invalid, std::string("mock script: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::config_invalid, "mock script must be a JSON list");
  std::vector<ScriptEntry> out;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("content") || !item["content"].is_string()) {
      throw Error(ErrorCode::config_invalid, "mock script entry needs a string 'content'");
    }
    ScriptEntry entry;
    entry.content = item["content"].get<std::string>();
    if (auto it = item.find("tag"); it != item.end() && !it->is_null()) {
      if (!it->is_string()) throw Error(ErrorCode::config_invalid, "mock script 'tag' must be string or null");
      entry.tag = it->get<std::string>();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::shared_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& path) {
  return std::make_shared<MockBackend>(parse_script(read_file(path)));
}

ChatResponse MockBackend::send(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  log_.push_back(request);
  for (std::size_t i = 0; i < script_.size(); ++i) {
    if (consumed_[i]) continue;
    const auto& entry = script_[i];
    if (entry.tag && *entry.tag != request.request_tag) continue;
    consumed_[i] = true;
    return ChatResponse{entry.content, proxy_usage(request, entry.content), "mock"};
  }
  throw Error(ErrorCode::script_exhausted,
              "no scripted response left for tag '" + request.request_tag + "'");
}

std::vector<ChatRequest> MockBackend::requests() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t MockBackend::remaining() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (bool c : consumed_) n += c ? 0 : 1;
  return n;
}

// ---------------------------------------------------------------------------
// FunctionBackend

ChatResponse FunctionBackend::send(const ChatRequest& request) {
  {
    std::lock_guard lock(mu_);
    log_.push_back(request);
  }
  std::string reply = responder_(request);
  TokenUsage usage = proxy_usage(request, reply);
  return ChatResponse{std::move(reply), usage, "function"};
}

std::vector<ChatRequest> FunctionBackend::requests() const {
  std::lock_guard lock(mu_);
  return log_;
}

// ---------------------------------------------------------------------------
// HttpChatBackend

HttpChatBackend::HttpChatBackend(HttpBackendOptions options) : options_(std::move(options)) {
  std::string base = options_.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  auto scheme_end = base.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::config_invalid, "API base URL needs a scheme: " + options_.base_url);
  }
  auto path_start = base.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = base;
  } else {
    scheme_host_port_ = base.substr(0, path_start);
    path_prefix_ = base.substr(path_start);
  }
}

HttpBackendOptions HttpChatBackend::options_from_env(std::string model) {
  HttpBackendOptions opts;
  opts.model = std::move(model);
  if (const char* base = std::getenv("TFGRPO_API_BASE")) opts.base_url = base;
  if (const char* key = std::getenv("TFGRPO_API_KEY")) opts.api_key = key;
  if (opts.base_url.empty()) throw Error(ErrorCode::config_invalid, "TFGRPO_API_BASE is not set");
  return opts;
}

std::string HttpChatBackend::encode_request(const ChatRequest& request, const std::string& model) {
  json body;
  body["model"] = model;
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_output_tokens;
  body["stream"] = false;
  json messages = json::array();
  for (const auto& m : request.messages) {
    // Tool observations travel as user turns; the protocol is textual.
    std::string role(m.role == Role::tool ? "user" : to_string(m.role));
    messages.push_back({{"role", role}, {"content", m.content}});
  }
  body["messages"] = std::move(messages);
  return body.dump(-1, ' ', false, json::error_handler_t::replace);
}

ChatResponse HttpChatBackend::decode_response(std::string_view body, const std::string& model) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::gateway_error, std::string("unparseable completion: ") + e.what());
  }
  ChatResponse out;
  out.model_name = doc.value("model", model);
  const auto& choices = doc.value("choices", json::array());
  if (choices.empty() || !choices[0].contains("message")) {
    throw Error(ErrorCode::gateway_error, "completion has no choices");
  }
  const auto& content = choices[0]["message"].value("content", json());
  out.content = content.is_string() ? content.get<std::string>() : std::string();
  if (auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
    out.usage.input_tokens = usage->value("prompt_tokens", std::int64_t{0});
    out.usage.output_tokens = usage->value("completion_tokens", std::int64_t{0});
    // Providers report cache hits under different names.
    if (usage->contains("prompt_cache_hit_tokens")) {
      out.usage.cached_input_tokens = usage->value("prompt_cache_hit_tokens", std::int64_t{0});
    } else if (auto details = usage->find("prompt_tokens_details");
               details != usage->end() && details->is_object()) {
      out.usage.cached_input_tokens = details->value("cached_tokens", std::int64_t{0});
    }
    if (out.usage.cached_input_tokens > out.usage.input_tokens) {
      out.usage.cached_input_tokens = out.usage.input_tokens;
    }
  }
  return out;
}

ChatResponse HttpChatBackend::send(const ChatRequest& request) {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(std::chrono::seconds(30));
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(std::chrono::seconds(60));
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);
  auto result = client.Post(path_prefix_ + "/chat/completions", headers,
                            encode_request(request, options_.model), "application/json");
  if (!result) {
    throw TransientError("transport failure: " + httplib::to_string(result.error()));
  }
  int status = result->status;
  if (status == 429 || status >= 500) {
    throw TransientError("HTTP " + std::to_string(status) + ": " + result->body.substr(0, 500));
  }
  if (status != 200) {
    throw Error(ErrorCode::gateway_error,
                "HTTP " + std::to_string(status) + ": " + result->body.substr(0, 500));
  }
  return decode_response(result->body, options_.model);
}

// ---------------------------------------------------------------------------

double estimate_cost(const TokenUsage& usage, const PricingTable& pricing) {
  const double uncached = static_cast<double>(usage.input_tokens - usage.cached_input_tokens);
  return uncached * pricing.input_price_per_1m / 1e6 +
         static_cast<double>(usage.cached_input_tokens) * pricing.cached_input_price_per_1m / 1e6 +
         static_cast<double>(usage.output_tokens) * pricing.output_price_per_1m / 1e6;
}

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, RetryPolicy policy, Sleeper sleeper)
    : backend_(std::move(backend)), policy_(policy), sleeper_(std::move(sleeper)) {
  if (!backend_) throw Error(ErrorCode::invalid_argument, "gateway needs a backend");
  if (policy_.max_attempts < 1) policy_.max_attempts = 1;
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

ChatResponse Gateway::complete(const ChatRequest& request) {
  if (request.temperature < 0) {
    throw Error(ErrorCode::invalid_argument, "temperature must be non-negative");
  }
  auto backoff = policy_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      ChatResponse response = backend_->send(request);
      std::lock_guard lock(mu_);
      report_.by_tag[request.request_tag] += response.usage;
      report_.total += response.usage;
      log_.push_back({request.request_tag, response.usage, attempt, true});
      return response;
    } catch (const TransientError& e) {
      if (attempt >= policy_.max_attempts) {
        {
          std::lock_guard lock(mu_);
          log_.push_back({request.request_tag, {}, attempt, false});
        }
        throw Error(ErrorCode::gateway_error, "retries exhausted after " +
                                                  std::to_string(attempt) + " attempts: " + e.what());
      }
      sleeper_(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<std::int64_t>(static_cast<double>(backoff.count()) * policy_.multiplier));
    } catch (const Error&) {
      std::lock_guard lock(mu_);
      log_.push_back({request.request_tag, {}, attempt, false});
      throw;
    }
  }
}

UsageReport Gateway::usage_report() const {
  std::lock_guard lock(mu_);
  return report_;
}

TokenUsage Gateway::total_usage() const {
  std::lock_guard lock(mu_);
  return report_.total;
}

std::vector<CallRecord> Gateway::call_log() const {
  std::lock_guard lock(mu_);
  return log_;
}

int Gateway::total_retries() const {
  std::lock_guard lock(mu_);
  int n = 0;
  for (const auto& r : log_) n += r.attempts - 1;
  return n;
}

}  // namespace tfgrpo
