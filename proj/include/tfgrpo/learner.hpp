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

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tfgrpo/agent_runtime.hpp"
#include "tfgrpo/core_model.hpp"
#include "tfgrpo/llm_gateway.hpp"
#include "tfgrpo/reward_judge.hpp"

namespace tfgrpo {

struct StepRecord {
  std::int64_t step = 0;
  int epoch = 0;  // 1-based
  int batch = 0;  // 1-based within the epoch
  double mean_train_reward = 0.0;
  int groups_total = 0;
  int groups_extracted = 0;
  int ops_applied = 0;
  int ops_rejected = 0;
  int library_size_after = 0;
  double avg_tool_calls = 0.0;
  TokenUsage usage;
};

struct RejectedOp {
  LibraryOp op;
  std::string reason;
};

struct OptimizeResult {
  ExperienceLibrary library;
  std::vector<LibraryOp> applied;
  std::vector<RejectedOp> rejected;
};

// ---------------------------------------------------------------------------
// Library operation calculus

/// Applies one op to `working` as optimization step `step`. Returns the
/// rejection reason, leaving `working` untouched, when the op is invalid
/// against the current state (missing id, word cap, merge arity, bad shape).
std::optional<std::string> apply_op(ExperienceLibrary& working, const LibraryOp& op,
                                    std::int64_t step, int max_experience_words);

/// Applies ops sequentially, in list order, against a working copy and counts
/// as one optimization step (library.step + 1).
OptimizeResult apply_ops(const ExperienceLibrary& lib, std::span<const LibraryOp> ops,
                         int max_experience_words);

/// Whitespace runs collapsed to single spaces, ends trimmed.
std::string normalize_experience_text(std::string_view text);

// ---------------------------------------------------------------------------
// Model-output parsing and prompt assembly

struct ParsedOps {
  std::vector<LibraryOp> ops;
  std::vector<std::string> rejected;  // raw items with unknown or missing option
  std::string rationale;              // text preceding the JSON list
};

/// Extracts the operation list from a reply: the last fenced block holding a
/// JSON list, else the last bracketed list in the text. Tolerates `#` and `//`
/// comments, `...` placeholders and trailing commas. Throws
/// Error(parse_failure) when no list is found.
ParsedOps parse_op_list(std::string_view reply);

std::string ops_to_json(std::span<const LibraryOp> ops);

/// Transcript handed to the summarizer: every message after the system
/// prompt, tagged with its role.
std::string render_trajectory(const Trajectory& traj);
std::string render_summaries(std::span<const TrajectorySummary> summaries);
std::string render_suggestions(std::span<const SemanticAdvantage> advantages);

// ---------------------------------------------------------------------------
// Model-backed steps

TrajectorySummary summarize_trajectory(Gateway& gateway, const Query& query,
                                       const GroupMember& member, std::size_t member_index,
                                       const LearnConfig& cfg);

/// Group-relative semantic advantage for one group. One corrective reprompt,
/// then Error(parse_failure).
SemanticAdvantage extract_advantage(Gateway& gateway, const Query& query,
                                    const RolloutGroup& group,
                                    std::span<const TrajectorySummary> summaries,
                                    const ExperienceLibrary& lib, const LearnConfig& cfg);

/// One batch-level optimization call over all advantages. With no advantages
/// nothing is rendered and the library comes back unchanged. One corrective
/// reprompt, then Error(parse_failure).
OptimizeResult optimize_library(Gateway& gateway, const ExperienceLibrary& lib,
                                std::span<const SemanticAdvantage> advantages,
                                const LearnConfig& cfg);

/// Baseline library written in one shot by the model, without any rollouts.
ExperienceLibrary generate_direct_experiences(Gateway& gateway, int n, DomainTag domain,
                                              const LearnConfig& cfg);

// ---------------------------------------------------------------------------

struct LearnResult {
  ExperienceLibrary library;
  std::vector<StepRecord> records;
  std::vector<std::string> events;
};

struct LearnerOptions {
  std::optional<std::filesystem::path> checkpoint_dir;
  std::function<void(const StepRecord&, const ExperienceLibrary&)> on_step;
};

std::string checkpoint_file_name(std::int64_t step);

/// The training-free loop: per batch, group rollouts under a frozen library
/// snapshot, grading, summarization and advantage extraction for groups with
/// a reward spread, then one serialized optimization step.
class Learner {
 public:
  Learner(Gateway& gateway, const AgentRunner& agent, RewardFn reward, AgentMode mode,
          LearnConfig cfg, LearnerOptions options = {});

  LearnResult learn(const std::vector<Query>& dataset, ExperienceLibrary initial = {});

 private:
  Gateway& gateway_;
  const AgentRunner& agent_;
  RewardFn reward_;
  AgentMode mode_;
  LearnConfig cfg_;
  LearnerOptions options_;
};

std::string step_records_csv(std::span<const StepRecord> records);

}  // namespace tfgrpo
