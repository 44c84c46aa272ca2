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

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <regex>
#include <set>
#include <string>
#include <string_view>

#include "tfgrpo/llm_gateway.hpp"

namespace tfgrpo::testing {

inline constexpr std::string_view kHintText = "use the hint";

inline int count_occurrences(std::string_view haystack, std::string_view needle) {
  int n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

/// Scripted policy whose behaviour is a pure function of the injected
/// library: with h hint experiences, member m of a group succeeds iff
/// m < 1 + h, and every rollout spends max(0, 3 - h) code turns before
/// answering. Extraction proposes hint number h + 1; optimization adds every
/// suggested text the library does not already hold.
class HintPolicy {
 public:
  explicit HintPolicy(int group_size) : group_size_(group_size) {}

  std::string operator()(const ChatRequest& req) {
    const std::string& prompt = req.messages.size() > 1 ? req.messages[1].content : req.messages[0].content;
    const int hints = count_occurrences(prompt, kHintText);
    if (req.request_tag == "rollout") return rollout(req, hints);
    if (req.request_tag == "summary") return "1. The agent worked through the problem.";
    if (req.request_tag == "extract") {
      return "Reasoning.\n```json\n[{\"option\": \"add\", \"experience\": \"When stuck, " +
             std::string(kHintText) + " number " + std::to_string(hints + 1) + ".\"}]\n```";
    }
    if (req.request_tag == "optimize") return pass_through(prompt);
    return "unexpected";
  }

 private:
  static std::string pass_through(const std::string& prompt) {
    static const std::regex suggested(R"re("experience":"([^"]*)")re");
    std::set<std::string> seen;
    std::string ops;
    for (std::sregex_iterator it(prompt.begin(), prompt.end(), suggested), end; it != end; ++it) {
      std::string text = (*it)[1];
      if (prompt.find(": " + text + "\n") != std::string::npos || !seen.insert(text).second) continue;
      if (!ops.empty()) ops += ", ";
      ops += "{\"option\": \"add\", \"experience\": \"" + text + "\"}";
    }
    return "```json\n[" + ops + "]\n```";
  }

  std::string rollout(const ChatRequest& req, int hints) {
    int assistant_turns = 0;
    for (const auto& m : req.messages) assistant_turns += m.role == Role::assistant ? 1 : 0;
    const int code_turns = std::max(0, 3 - hints);
    if (assistant_turns < code_turns) return "Checking.\n```python\nprint(" + std::to_string(assistant_turns) + ")\n```";
    int member;
    {
      std::lock_guard lock(state_->mu);
      member = state_->started[req.messages[1].content]++ % group_size_;
    }
    return member < 1 + hints ? "<answer>\\boxed{42}</answer>" : "<answer>\\boxed{0}</answer>";
  }

  struct State {
    std::mutex mu;
    std::map<std::string, int> started;  // rollouts answered per distinct first prompt
  };

  int group_size_;
  std::shared_ptr<State> state_ = std::make_shared<State>();
};

}  // namespace tfgrpo::testing
