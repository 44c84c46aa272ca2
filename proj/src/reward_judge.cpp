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

#include "tfgrpo/reward_judge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tfgrpo/error.hpp"
#include "tfgrpo/prompt_kit.hpp"
#include "tfgrpo/text_util.hpp"

namespace tfgrpo {

namespace {

bool is_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::string normalize_answer(std::string_view answer) {
  std::string out;
  for (const auto& word : split_whitespace(answer)) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  if (!out.empty() && out.front() == '+') out.erase(0, 1);
  std::string_view body = out;
  bool negative = false;
  if (!body.empty() && body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  if (is_digits(body)) {
    auto first = body.find_first_not_of('0');
    std::string digits = first == std::string_view::npos ? "0" : std::string(body.substr(first));
    if (digits == "0") negative = false;
    return negative ? "-" + digits : digits;
  }
  return out;
}

Reward grade_math(const std::optional<std::string>& answer, std::string_view ground_truth) {
  if (!answer) return Reward{0.0, std::string(kMathGraderId), "no_answer"};
  bool match = normalize_answer(*answer) == normalize_answer(ground_truth);
  return Reward{match ? 1.0 : 0.0, std::string(kMathGraderId), match ? "match" : "mismatch"};
}

std::optional<bool> parse_verdict(std::string_view reply) {
  std::string_view word = trim(reply);
  if (!word.empty() && word.back() == '.') word.remove_suffix(1);
  std::string lower = to_lower_ascii(word);
  if (lower == "yes") return true;
  if (lower == "no") return false;
  return std::nullopt;
}

Reward grade_judged(Gateway& gateway, const std::optional<std::string>& answer,
                    std::string_view ground_truth, std::string_view question, double temperature) {
  if (!answer) return Reward{0.0, std::string(kJudgeGraderId), "no_answer"};
  ChatRequest request;
  request.temperature = temperature;
  request.max_output_tokens = 16;
  request.request_tag = "judge";
  request.messages.push_back(
      {Role::user, Template::builtin(TemplateName::judge)
                       .render({{"question", std::string(question)},
                                {"groundtruth", std::string(ground_truth)},
                                {"answer", *answer}})});
  for (int attempt = 0; attempt < 2; ++attempt) {
    ChatResponse reply = gateway.complete(request);
    if (auto verdict = parse_verdict(reply.content)) {
      std::string detail = *verdict ? "YES" : "NO";
      detail += " retries=" + std::to_string(attempt);
      return Reward{*verdict ? 1.0 : 0.0, std::string(kJudgeGraderId), detail};
    }
    request.messages.push_back({Role::assistant, reply.content});
    request.messages.push_back(
        {Role::user, std::string(embedded_body(TemplateName::reprompt_judge))});
  }
  throw Error(ErrorCode::judge_unparseable, "judge reply was not YES or NO after one reprompt");
}

GroupStats group_stats(std::span<const double> rewards) {
  if (rewards.empty()) throw Error(ErrorCode::empty_group, "group has no rewards");
  GroupStats stats;
  stats.rewards.assign(rewards.begin(), rewards.end());
  const double n = static_cast<double>(rewards.size());
  stats.mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : rewards) ss += (r - stats.mean) * (r - stats.mean);
  stats.std = std::sqrt(ss / n);
  auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
  stats.degenerate = *lo == *hi;
  stats.advantages.assign(rewards.size(), 0.0);
  if (!stats.degenerate) {
    for (std::size_t i = 0; i < rewards.size(); ++i) {
      stats.advantages[i] = (rewards[i] - stats.mean) / stats.std;
    }
  }
  return stats;
}

bool should_extract(const GroupStats& stats, const LearnConfig& cfg) {
  return !stats.degenerate || !cfg.use_group_computation;
}

RewardFn math_reward() {
  return [](const Query& q, const Trajectory& t) {
    if (!q.ground_truth) return Reward{0.0, std::string(kUngradedGraderId), "no_ground_truth"};
    return grade_math(t.final_answer, *q.ground_truth);
  };
}

RewardFn judged_reward(Gateway& gateway) {
  return [&gateway](const Query& q, const Trajectory& t) {
    if (!q.ground_truth) return Reward{0.0, std::string(kUngradedGraderId), "no_ground_truth"};
    return grade_judged(gateway, t.final_answer, *q.ground_truth, q.problem_text);
  };
}

}  // namespace tfgrpo
