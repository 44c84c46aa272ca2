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

#include "tfgrpo/agent_runtime.hpp"

#include <algorithm>
#include <regex>

#include <nlohmann/json.hpp>

#include "tfgrpo/error.hpp"
#include "tfgrpo/prompt_kit.hpp"
#include "tfgrpo/text_util.hpp"

namespace tfgrpo {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string_view to_string(AgentKind kind) {
  return kind == AgentKind::direct ? "direct" : "react";
}

bool AgentMode::uses(std::string_view tool) const {
  return std::find(tool_names.begin(), tool_names.end(), tool) != tool_names.end();
}

std::vector<std::string> AgentMode::violations() const {
  std::vector<std::string> out;
  if (kind == AgentKind::direct && !tool_names.empty()) out.push_back("direct mode takes no tools");
  for (const auto& name : tool_names) {
    if (!parse_tool_kind(name)) out.push_back("unknown tool '" + name + "'");
  }
  if (kind == AgentKind::react && tool_names.empty()) out.push_back("react mode needs a tool");
  return out;
}

// ---------------------------------------------------------------------------
// Parsing helpers

namespace {

std::size_t leading_backticks(std::string_view s) {
  std::size_t n = 0;
  while (n < s.size() && s[n] == '`') ++n;
  return n;
}

bool is_python_info(std::string_view info) {
  auto words = split_whitespace(info);
  if (words.empty()) return false;
  auto lang = to_lower_ascii(words.front());
  return lang == "python" || lang == "py" || lang == "python3";
}

bool closes_fence(std::string_view trimmed, std::size_t open_ticks) {
  std::size_t ticks = leading_backticks(trimmed);
  if (ticks < open_ticks) return false;
  auto rest = trimmed.substr(ticks);
  return std::none_of(rest.begin(), rest.end(),
                      [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
}

struct BoxedSpan {
  std::size_t start;
  std::size_t end;  // one past the closing brace
  std::string content;
};

// Top-level \boxed{...} spans with balanced braces, in order.
std::vector<BoxedSpan> boxed_spans(std::string_view text) {
  static constexpr std::string_view kBoxed = "\\boxed";
  std::vector<BoxedSpan> out;
  std::size_t pos = 0;
  while ((pos = text.find(kBoxed, pos)) != std::string_view::npos) {
    std::size_t brace = pos + kBoxed.size();
    while (brace < text.size() && (text[brace] == ' ' || text[brace] == '\t')) ++brace;
    if (brace >= text.size() || text[brace] != '{') {
      pos += kBoxed.size();
      continue;
    }
    int depth = 0;
    std::size_t i = brace;
    for (; i < text.size(); ++i) {
      if (text[i] == '\\' && i + 1 < text.size() && (text[i + 1] == '{' || text[i + 1] == '}')) {
        ++i;
        continue;
      }
      if (text[i] == '{') ++depth;
      if (text[i] == '}' && --depth == 0) break;
    }
    if (i >= text.size()) {
      pos += kBoxed.size();
      continue;
    }
    out.push_back({pos, i + 1, std::string(text.substr(brace + 1, i - brace - 1))});
    pos = i + 1;
  }
  return out;
}

std::optional<std::string> innermost(std::string content) {
  for (;;) {
    std::string_view t = trim(content);
    auto inner = boxed_spans(t);
    if (inner.size() == 1 && inner[0].start == 0 && inner[0].end == t.size()) {
      content = inner[0].content;
      continue;
    }
    if (t.empty()) return std::nullopt;
    return std::string(t);
  }
}

std::string unescape_literal(std::string_view body) {
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\\' && i + 1 < body.size()) {
      char next = body[++i];
      out.push_back(next == 'n' ? '\n' : next == 't' ? '\t' : next);
    } else {
      out.push_back(body[i]);
    }
  }
  return out;
}

}  // namespace

CodeBlockScan scan_code_blocks(std::string_view text) {
  CodeBlockScan scan;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    std::size_t ticks = leading_backticks(line);
    if (ticks < 3) continue;
    std::string_view info = trim(line.substr(ticks));
    std::size_t close = i + 1;
    while (close < lines.size() && !closes_fence(trim(lines[close]), ticks)) ++close;
    if (close >= lines.size()) {
      scan.unclosed_fence = true;
      break;
    }
    if (is_python_info(info)) {
      std::string block;
      for (std::size_t k = i + 1; k < close; ++k) {
        if (k > i + 1) block.push_back('\n');
        block += lines[k];
      }
      scan.blocks.push_back(std::move(block));
    }
    i = close;
  }
  return scan;
}

std::vector<std::string> extract_code_blocks(std::string_view text) {
  return scan_code_blocks(text).blocks;
}

std::optional<std::string> extract_final_answer(std::string_view text) {
  static constexpr std::string_view kOpen = "<answer>";
  static constexpr std::string_view kClose = "</answer>";
  std::optional<std::string> tagged;
  std::size_t pos = 0;
  while ((pos = text.find(kOpen, pos)) != std::string_view::npos) {
    std::size_t body = pos + kOpen.size();
    std::size_t stop = text.find(kClose, body);
    std::string_view span = text.substr(body, stop == std::string_view::npos ? text.npos : stop - body);
    auto spans = boxed_spans(span);
    for (auto it = spans.rbegin(); it != spans.rend(); ++it) {
      if (auto value = innermost(it->content)) {
        tagged = value;
        break;
      }
    }
    if (stop == std::string_view::npos) break;
    pos = stop + kClose.size();
  }
  if (tagged) return tagged;
  auto spans = boxed_spans(text);
  for (auto it = spans.rbegin(); it != spans.rend(); ++it) {
    if (auto value = innermost(it->content)) return value;
  }
  return std::nullopt;
}

std::optional<std::vector<WebCall>> parse_web_calls(std::string_view code) {
  static const std::regex kSearch(
      R"re(^(?:google_search|web_search)\(\s*(?:query\s*=\s*)?("((?:[^"\\]|\\.)*)"|'((?:[^'\\]|\\.)*)')\s*(?:,\s*(?:num_results\s*=\s*)?(\d+)\s*)?\)$)re");
  static const std::regex kFetch(
      R"re(^get_content\(\s*(?:url\s*=\s*)?("((?:[^"\\]|\\.)*)"|'((?:[^'\\]|\\.)*)')\s*\)$)re");
  std::vector<WebCall> calls;
  for (const auto& raw : split_lines(code)) {
    std::string line(trim(raw));
    if (line.empty() || line.front() == '#') continue;
    if (starts_with(line, "print(") && line.back() == ')') line = std::string(trim(line.substr(6, line.size() - 7)));
    std::smatch m;
    if (std::regex_match(line, m, kSearch)) {
      WebCall call;
      call.kind = WebCall::Kind::search;
      call.argument = unescape_literal(m[2].matched ? m[2].str() : m[3].str());
      if (m[4].matched) call.num_results = std::stoi(m[4].str());
      calls.push_back(std::move(call));
    } else if (std::regex_match(line, m, kFetch)) {
      WebCall call;
      call.kind = WebCall::Kind::fetch;
      call.argument = unescape_literal(m[2].matched ? m[2].str() : m[3].str());
      calls.push_back(std::move(call));
    } else {
      return std::nullopt;
    }
  }
  if (calls.empty()) return std::nullopt;
  return calls;
}

// ---------------------------------------------------------------------------
// AgentRunner

AgentRunner::AgentRunner(Gateway& gateway, ToolBelt tools, AgentOptions options)
    : gateway_(gateway), tools_(std::move(tools)), options_(options) {}

std::vector<ChatMessage> AgentRunner::initial_messages(const Query& query,
                                                       const ExperienceLibrary& lib,
                                                       const AgentMode& mode) {
  TemplateName system = TemplateName::direct_system;
  if (mode.kind == AgentKind::react) {
    system = mode.uses("code_interpreter") ? TemplateName::react_system
                                           : TemplateName::react_web_system;
  }
  std::vector<ChatMessage> messages;
  messages.push_back({Role::system, std::string(embedded_body(system))});
  messages.push_back({Role::user, Template::builtin(TemplateName::experience_injection)
                                      .render({{"problem", query.problem_text},
                                               {"experiences", serialize_library(lib)}})});
  return messages;
}

std::string AgentRunner::run_snippet(const std::string& code, const AgentMode& mode,
                                     std::string& tool_name) const {
  const bool web_enabled = tools_.web && (mode.uses("web_search") || mode.uses("page_fetch"));
  if (web_enabled) {
    if (auto calls = parse_web_calls(code)) {
      std::string out;
      for (const auto& call : *calls) {
        Observation obs;
        if (call.kind == WebCall::Kind::search) {
          tool_name = "web_search";
          if (!mode.uses("web_search")) {
            obs = {ExecStatus::error, "web_search is not available", {}};
          } else {
            try {
              json hits = json::array();
              for (const auto& h : tools_.web->web_search(call.argument, call.num_results)) {
                hits.push_back({{"title", h.title}, {"url", h.url}, {"snippet", h.snippet}});
              }
              obs = {ExecStatus::ok, hits.dump(-1, ' ', false, json::error_handler_t::replace), {}};
            } catch (const Error& e) {
              obs = {ExecStatus::error, e.what(), {}};
            }
          }
        } else {
          tool_name = "page_fetch";
          if (!mode.uses("page_fetch")) {
            obs = {ExecStatus::error, "get_content is not available", {}};
          } else {
            try {
              obs = {ExecStatus::ok, tools_.web->get_content(call.argument).text, {}};
            } catch (const Error& e) {
              obs = {ExecStatus::error, e.what(), {}};
            }
          }
        }
        if (!out.empty()) out.push_back('\n');
        out += format_observation(obs);
      }
      return out;
    }
  }
  if (tools_.code && mode.uses("code_interpreter")) {
    tool_name = "code_interpreter";
    try {
      return format_observation(tools_.code->execute(code, tools_.code_timeout));
    } catch (const Error& e) {
      return format_observation({ExecStatus::error, e.what(), {}});
    }
  }
  tool_name = "none";
  return format_observation({ExecStatus::error, "no tool is available to run this snippet", {}});
}

Trajectory AgentRunner::run_rollout(const Query& query, const ExperienceLibrary& lib,
                                    const AgentMode& mode, double temperature) const {
  Trajectory traj;
  traj.query_id = query.id;
  traj.messages = initial_messages(query, lib, mode);
  traj.terminated_reason = TerminationReason::turn_limit;

  for (int turn = 0; turn < options_.max_turns; ++turn) {
    ChatRequest request{traj.messages, temperature, options_.max_output_tokens, "rollout"};
    ChatResponse reply;
    try {
      reply = gateway_.complete(request);
    } catch (const Error& e) {
      traj.terminated_reason = TerminationReason::gateway_error;
      traj.notes.push_back(e.what());
      return traj;
    }
    traj.usage += reply.usage;
    traj.messages.push_back({Role::assistant, reply.content});

    if (auto answer = extract_final_answer(reply.content)) {
      traj.final_answer = std::move(answer);
      traj.terminated_reason = TerminationReason::answered;
      return traj;
    }

    CodeBlockScan scan;
    if (mode.kind == AgentKind::react) scan = scan_code_blocks(reply.content);
    if (scan.unclosed_fence) traj.notes.push_back("turn " + std::to_string(turn) + ": unclosed code fence ignored");

    if (scan.blocks.empty() && reply.content.find("<answer>") != std::string::npos) {
      traj.terminated_reason = TerminationReason::parse_failure;
      traj.notes.push_back("answer tag without a boxed answer");
      return traj;
    }

    if (!scan.blocks.empty()) {
      ToolCall call;
      call.turn_index = static_cast<std::size_t>(turn);
      auto start = Clock::now();
      std::vector<std::string> names;
      std::string observation;
      for (std::size_t i = 0; i < scan.blocks.size(); ++i) {
        std::string name;
        std::string obs = run_snippet(scan.blocks[i], mode, name);
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
        if (i > 0) {
          observation.push_back('\n');
          call.payload += "\n\n";
        }
        observation += obs;
        call.payload += scan.blocks[i];
      }
      call.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
      for (std::size_t i = 0; i < names.size(); ++i) {
        call.tool_name += (i > 0 ? "," : "") + names[i];
      }
      call.observation = observation;
      traj.tool_calls.push_back(std::move(call));
      traj.messages.push_back({Role::tool, std::move(observation)});
      continue;
    }
    traj.messages.push_back({Role::user, std::string(embedded_body(TemplateName::nudge))});
  }
  return traj;
}

}  // namespace tfgrpo
