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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tfgrpo/error.hpp"

namespace tfgrpo {

/// Per-reply cap on observation text handed back to the model.
inline constexpr std::size_t kObservationCharLimit = 4000;

enum class ToolKind { code_interpreter, web_search, page_fetch };

std::string_view to_string(ToolKind kind);
std::optional<ToolKind> parse_tool_kind(std::string_view text);

struct ToolSpec {
  std::string name;
  ToolKind kind = ToolKind::code_interpreter;
  std::optional<std::string> endpoint;
  std::optional<std::filesystem::path> fixtures;
  // In-process code interpreter: "python" runs a local python3, "scripted"
  // returns canned replies. Only meaningful for code_interpreter.
  std::optional<std::string> in_process;

  std::vector<std::string> violations() const;
};

enum class ExecStatus { ok, error, timeout };

std::string_view to_string(ExecStatus status);
std::optional<ExecStatus> parse_exec_status(std::string_view text);

struct Observation {
  ExecStatus status = ExecStatus::ok;
  std::string message;
  std::chrono::milliseconds wall_time{0};
};

/// Single-line mapping text with status and "message" fields, message capped
/// at kObservationCharLimit.
std::string format_observation(const Observation& obs);

class CodeInterpreter {
 public:
  virtual ~CodeInterpreter() = default;
  /// status=error is a successful round-trip reporting a failing snippet;
  /// an unreachable backend throws Error(sandbox_unreachable).
  virtual Observation execute(const std::string& code, std::chrono::milliseconds timeout) = 0;
};

/// Client for the sandbox service: POST /execute
/// {"code", "timeout_seconds"} -> {"status", "message"}.
class SandboxClient : public CodeInterpreter {
 public:
  explicit SandboxClient(std::string endpoint);
  Observation execute(const std::string& code, std::chrono::milliseconds timeout) override;

  static constexpr std::chrono::milliseconds kGrace{1000};

 private:
  std::string endpoint_;
};

/// Runs each snippet as a fresh `python3 -c` child in its own temporary
/// directory, merging stdout and stderr. Killed at the timeout.
class LocalPythonInterpreter : public CodeInterpreter {
 public:
  explicit LocalPythonInterpreter(std::string python = "python3",
                                  std::size_t output_cap = 16 * 1024);
  Observation execute(const std::string& code, std::chrono::milliseconds timeout) override;

 private:
  std::string python_;
  std::size_t output_cap_;
};

/// Canned replies for deterministic tests: exact-code matches first, then a
/// FIFO queue, then the default reply.
class ScriptedInterpreter : public CodeInterpreter {
 public:
  explicit ScriptedInterpreter(Observation fallback = {ExecStatus::ok, "executed", {}});

  void on_code(std::string code, Observation reply);
  void enqueue(Observation reply);
  Observation execute(const std::string& code, std::chrono::milliseconds timeout) override;
  std::vector<std::string> executed() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, Observation> by_code_;
  std::deque<Observation> queue_;
  Observation fallback_;
  std::vector<std::string> executed_;
};

struct SearchHit {
  std::string title;
  std::string url;
  std::string snippet;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

struct FixtureDoc {
  std::string url;
  std::string title;
  std::string text;
};

/// Fixture corpus: a directory of JSON docs {"url", "title", "text"} read in
/// file-name order, which is the tie-break order for search.
class FixtureCorpus {
 public:
  FixtureCorpus() = default;
  explicit FixtureCorpus(std::vector<FixtureDoc> docs);
  static FixtureCorpus load(const std::filesystem::path& dir);

  const std::vector<FixtureDoc>& docs() const { return docs_; }
  const FixtureDoc* find_url(std::string_view url) const;

 private:
  std::vector<FixtureDoc> docs_;
};

/// Lower-cased alphanumeric runs.
std::vector<std::string> search_tokens(std::string_view text);

struct PageContent {
  bool ok = false;
  std::string text;
};

struct WebToolsOptions {
  std::optional<FixtureCorpus> corpus;
  // GET <search_endpoint>?q=..&num=.. returning [{"title","url","snippet"}].
  std::optional<std::string> search_endpoint;
  bool live_fetch = false;
};

class WebTools {
 public:
  explicit WebTools(WebToolsOptions options);

  /// Fixture mode ranks docs by the number of distinct query tokens they
  /// contain (title and text), dropping zero-score docs; ties keep corpus order.
  std::vector<SearchHit> web_search(const std::string& query, int num_results) const;
  /// Throws Error(fetch_failed) with the cause, or Error(no_backend).
  PageContent get_content(const std::string& url) const;

 private:
  WebToolsOptions options_;
};

/// Markup to plain text: drops script/style bodies and tags, decodes a few
/// common entities and collapses whitespace.
std::string strip_markup(std::string_view html);

/// The tools one rollout may use. Null members are unavailable.
struct ToolBelt {
  std::shared_ptr<CodeInterpreter> code;
  std::shared_ptr<WebTools> web;
  std::chrono::milliseconds code_timeout{10000};
};

}  // namespace tfgrpo
