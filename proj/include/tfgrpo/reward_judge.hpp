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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tfgrpo/core_model.hpp"
#include "tfgrpo/llm_gateway.hpp"

namespace tfgrpo {

inline constexpr std::string_view kMathGraderId = "math_exact";
inline constexpr std::string_view kJudgeGraderId = "model_judge";
inline constexpr std::string_view kUngradedGraderId = "ungraded";

/// String-level canonical form: trim, collapse whitespace runs, drop a
/// leading '+', strip leading zeros from integer literals.
std::string normalize_answer(std::string_view answer);

Reward grade_math(const std::optional<std::string>& answer, std::string_view ground_truth);

/// Asks the model whether `answer` agrees with `ground_truth`. One corrective
/// reprompt on an unparseable verdict, then Error(judge_unparseable).
Reward grade_judged(Gateway& gateway, const std::optional<std::string>& answer,
                    std::string_view ground_truth, std::string_view question,
                    double temperature = 0.0);

/// Strict single-word verdict: "YES"/"NO" (case-insensitive, one optional
/// trailing period).
std::optional<bool> parse_verdict(std::string_view reply);

struct GroupStats {
  std::vector<double> rewards;
  double mean = 0.0;
  double std = 0.0;  // population
  std::vector<double> advantages;
  bool degenerate = false;
};

/// Group-relative standardization (r - mean) / std with population std. A
/// group whose rewards are all equal is degenerate and gets zero advantages.
GroupStats group_stats(std::span<const double> rewards);

bool should_extract(const GroupStats& stats, const LearnConfig& cfg);

/// Scores one finished rollout against its query.
using RewardFn = std::function<Reward(const Query&, const Trajectory&)>;

RewardFn math_reward();
RewardFn judged_reward(Gateway& gateway);

}  // namespace tfgrpo
