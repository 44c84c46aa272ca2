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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tfgrpo/core_model.hpp"
#include "tfgrpo/llm_gateway.hpp"
#include "tfgrpo/toolbelt.hpp"

namespace tfgrpo {

enum class AgentKind { direct, react };

std::string_view to_string(AgentKind kind);

struct AgentMode {
  AgentKind kind = AgentKind::react;
  std::vector<std::string> tool_names;  // react only

  static AgentMode direct() { return {AgentKind::direct, {}}; }
  static AgentMode react(std::vector<std::string> tools = {"code_interpreter"}) {
    return {AgentKind::react, std::move(tools)};
  }

  bool uses(std::string_view tool) const;
  std::vector<std::string> violations() const;
};

struct CodeBlockScan {
  std::vector<std::string> blocks;
  bool unclosed_fence = false;
};

/// Fenced blocks whose info string names Python ("python", "py", "python3"),
/// in document order with the fences stripped. An unclosed fence is ignored
/// and reported through `unclosed_fence`.
CodeBlockScan scan_code_blocks(std::string_view text);
std::vector<std::string> extract_code_blocks(std::string_view text);

/// Content of the last \boxed{...} inside the last <answer>...</answer> span
/// (descending into directly nested \boxed), else the last \boxed anywhere.
/// Trimmed; empty boxes count as absent.
std::optional<std::string> extract_final_answer(std::string_view text);

struct WebCall {
  enum class Kind { search, fetch } kind = Kind::search;
  std::string argument;
  int num_results = 5;
};

/// Parses a snippet made solely of `google_search("q", num_results=n)`,
/// `web_search(...)` and `get_content("url")` lines. Returns nothing when any
/// non-blank line is something else.
std::optional<std::vector<WebCall>> parse_web_calls(std::string_view code);

struct AgentOptions {
  int max_turns = 16;
  int max_output_tokens = 4096;
};

/// Executes single rollouts. Stateless between calls; safe to share across
/// threads as long as the gateway and tools are.
class AgentRunner {
 public:
  AgentRunner(Gateway& gateway, ToolBelt tools, AgentOptions options = {});

  Trajectory run_rollout(const Query& query, const ExperienceLibrary& lib, const AgentMode& mode,
                         double temperature) const;

  /// Initial messages for a rollout: system prompt plus the experience
  /// injection user turn.
  static std::vector<ChatMessage> initial_messages(const Query& query,
                                                   const ExperienceLibrary& lib,
                                                   const AgentMode& mode);

  const AgentOptions& options() const { return options_; }

 private:
  std::string run_snippet(const std::string& code, const AgentMode& mode,
                          std::string& tool_name) const;

  Gateway& gateway_;
  ToolBelt tools_;
  AgentOptions options_;
};

}  // namespace tfgrpo
