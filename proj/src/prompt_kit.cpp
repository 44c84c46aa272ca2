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

#include "tfgrpo/prompt_kit.hpp"

#include "tfgrpo/error.hpp"
#include "tfgrpo/text_util.hpp"

namespace tfgrpo {

// Defined in the generated prompt_bodies.cpp.
std::string_view embedded_prompt_file(std::string_view file_name);

std::string_view to_string(TemplateName name) {
  switch (name) {
    case TemplateName::react_system: return "react_system";
    case TemplateName::experience_injection: return "experience_injection";
    case TemplateName::summary: return "summary";
    case TemplateName::group_advantage: return "group_advantage";
    case TemplateName::optimization: return "optimization";
    case TemplateName::direct_system: return "direct_system";
    case TemplateName::react_web_system: return "react_web_system";
    case TemplateName::judge: return "judge";
    case TemplateName::direct_experiences: return "direct_experiences";
    case TemplateName::nudge: return "nudge";
    case TemplateName::reprompt_json: return "reprompt_json";
    case TemplateName::reprompt_judge: return "reprompt_judge";
    case TemplateName::reprompt_lines: return "reprompt_lines";
  }
  return "unknown";
}

std::string template_file_name(TemplateName name) { return std::string(to_string(name)) + ".txt"; }

std::vector<TemplateName> all_templates() {
  return {TemplateName::react_system,       TemplateName::experience_injection,
          TemplateName::summary,            TemplateName::group_advantage,
          TemplateName::optimization,       TemplateName::direct_system,
          TemplateName::react_web_system,   TemplateName::judge,
          TemplateName::direct_experiences, TemplateName::nudge,
          TemplateName::reprompt_json,      TemplateName::reprompt_judge,
          TemplateName::reprompt_lines};
}

std::vector<TemplateName> method_templates() {
  return {TemplateName::react_system, TemplateName::experience_injection, TemplateName::summary,
          TemplateName::group_advantage, TemplateName::optimization};
}

std::string_view embedded_body(TemplateName name) {
  return embedded_prompt_file(template_file_name(name));
}

namespace {

bool is_name_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

// Calls visit(literal) and visit_placeholder(name) in document order.
template <typename Literal, typename Placeholder>
void scan(std::string_view body, Literal&& literal, Placeholder&& placeholder) {
  std::size_t pos = 0;
  std::size_t literal_start = 0;
  while (pos < body.size()) {
    if (body[pos] != '{') {
      ++pos;
      continue;
    }
    std::size_t end = pos + 1;
    while (end < body.size() && is_name_char(body[end])) ++end;
    if (end > pos + 1 && end < body.size() && body[end] == '}') {
      literal(body.substr(literal_start, pos - literal_start));
      placeholder(body.substr(pos + 1, end - pos - 1));
      pos = end + 1;
      literal_start = pos;
    } else {
      ++pos;
    }
  }
  literal(body.substr(literal_start));
}

}  // namespace

Template::Template(TemplateName name, std::string body) : name_(name), body_(std::move(body)) {}

Template Template::builtin(TemplateName name) {
  return Template(name, std::string(embedded_body(name)));
}

std::set<std::string> Template::placeholders() const {
  std::set<std::string> out;
  scan(body_, [](std::string_view) {}, [&](std::string_view key) { out.emplace(key); });
  return out;
}

std::string Template::render(const Bindings& bindings) const {
  for (const auto& key : placeholders()) {
    if (bindings.find(key) == bindings.end()) {
      throw Error(ErrorCode::missing_binding, key);
    }
  }
  std::string out;
  out.reserve(body_.size());
  scan(
      body_, [&](std::string_view text) { out.append(text); },
      [&](std::string_view key) { out.append(bindings.find(key)->second); });
  return out;
}

Template Template::without_blocks(const std::vector<std::string>& tags) const {
  std::string body = body_;
  for (const auto& tag : tags) {
    const std::string open = "<" + tag + ">";
    const std::string close = "</" + tag + ">";
    auto start = body.find(open);
    if (start == std::string::npos) continue;
    auto stop = body.find(close, start);
    if (stop == std::string::npos) continue;
    stop += close.size();
    // Swallow the newline closing the block and one following blank line.
    if (stop < body.size() && body[stop] == '\n') ++stop;
    if (stop < body.size() && body[stop] == '\n') ++stop;
    body.erase(start, stop - start);
  }
  return Template(name_, std::move(body));
}

std::string serialize_library(const ExperienceLibrary& lib) {
  if (lib.empty()) return std::string(kEmptyLibrarySentinel);
  std::string out;
  for (std::size_t i = 0; i < lib.entries.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out += "[" + std::to_string(i + 1) + "]. " + lib.entries[i].text;
  }
  return out;
}

std::string serialize_library_with_ids(const ExperienceLibrary& lib) {
  if (lib.empty()) return std::string(kEmptyLibrarySentinel);
  std::string out;
  for (std::size_t i = 0; i < lib.entries.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out += lib.entries[i].id + ": " + lib.entries[i].text;
  }
  return out;
}

}  // namespace tfgrpo
