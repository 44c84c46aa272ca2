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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tfgrpo {

enum class DomainTag { math, web, other };

std::string_view to_string(DomainTag tag);
std::optional<DomainTag> parse_domain_tag(std::string_view text);

/// One training or evaluation task.
struct Query {
  std::string id;
  std::string problem_text;
  std::optional<std::string> ground_truth;
  DomainTag domain = DomainTag::math;
};

enum class Role { system, user, assistant, tool };

std::string_view to_string(Role role);

struct ChatMessage {
  Role role = Role::user;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct TokenUsage {
  std::int64_t input_tokens = 0;
  std::int64_t cached_input_tokens = 0;
  std::int64_t output_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& other) {
    input_tokens += other.input_tokens;
    cached_input_tokens += other.cached_input_tokens;
    output_tokens += other.output_tokens;
    return *this;
  }
  friend TokenUsage operator+(TokenUsage lhs, const TokenUsage& rhs) { return lhs += rhs; }
  friend TokenUsage operator-(const TokenUsage& lhs, const TokenUsage& rhs) {
    return {lhs.input_tokens - rhs.input_tokens, lhs.cached_input_tokens - rhs.cached_input_tokens,
            lhs.output_tokens - rhs.output_tokens};
  }
  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;

  bool valid() const {
    return input_tokens >= 0 && cached_input_tokens >= 0 && output_tokens >= 0 &&
           cached_input_tokens <= input_tokens;
  }
};

/// One tool round-trip. At most one per assistant turn: when a turn holds
/// several snippets they run in order and share a single record.
struct ToolCall {
  std::string tool_name;
  std::string payload;
  std::string observation;
  std::size_t turn_index = 0;
  std::chrono::milliseconds wall_time{0};
};

enum class TerminationReason { answered, turn_limit, gateway_error, parse_failure };

std::string_view to_string(TerminationReason reason);

struct Trajectory {
  std::string query_id;
  std::vector<ChatMessage> messages;
  std::vector<ToolCall> tool_calls;
  std::optional<std::string> final_answer;
  TerminationReason terminated_reason = TerminationReason::turn_limit;
  TokenUsage usage;
  // Free-form flags raised during the rollout (unclosed fences, gateway errors).
  std::vector<std::string> notes;

  std::size_t assistant_turns() const;
};

struct Reward {
  double value = 0.0;
  std::string grader_id;
  std::string detail;
};

struct GroupMember {
  Trajectory trajectory;
  Reward reward;
};

struct RolloutGroup {
  Query query;
  std::vector<GroupMember> members;
  std::int64_t library_snapshot_step = 0;

  std::vector<double> rewards() const;
};

struct Experience {
  std::string id;
  std::string text;
  std::int64_t created_step = 0;
  std::int64_t updated_step = 0;

  friend bool operator==(const Experience&, const Experience&) = default;
};

/// The ordered experience library injected into prompts. Plain value type;
/// ids are minted as "G<n>" from next_id and never reused.
struct ExperienceLibrary {
  std::vector<Experience> entries;
  std::int64_t next_id = 1;
  std::int64_t step = 0;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  const Experience* find(std::string_view id) const;
  Experience* find(std::string_view id);

  friend bool operator==(const ExperienceLibrary&, const ExperienceLibrary&) = default;
};

enum class OpKind { add, del, modify, merge, keep };

std::string_view to_string(OpKind kind);
std::optional<OpKind> parse_op_kind(std::string_view text);

struct LibraryOp {
  OpKind kind = OpKind::keep;
  std::optional<std::string> text;
  std::optional<std::string> target_id;
  std::optional<std::vector<std::string>> merged_from;

  static LibraryOp add(std::string text);
  static LibraryOp remove(std::string target_id);
  static LibraryOp modify(std::string target_id, std::string text);
  static LibraryOp merge(std::vector<std::string> ids, std::string text);
  static LibraryOp keep();

  friend bool operator==(const LibraryOp&, const LibraryOp&) = default;
};

/// Returns a description of the first field-shape violation, or nothing when
/// the op carries exactly the fields its kind requires.
std::optional<std::string> op_shape_violation(const LibraryOp& op);

struct SemanticAdvantage {
  std::string query_id;
  std::string rationale;
  std::vector<LibraryOp> ops;
};

struct TrajectorySummary {
  std::string query_id;
  std::size_t member_index = 0;
  std::string text;
};

struct LearnConfig {
  int epochs = 3;
  int batches_per_epoch = 1;
  int group_size = 5;
  double learn_temperature = 0.7;
  double eval_temperature = 0.3;
  int max_ops_per_group = 3;
  int max_experience_words = 32;
  int max_turns = 16;
  int concurrency = 1;
  std::uint64_t seed = 0;
  bool use_ground_truth = true;
  bool use_group_computation = true;

  /// Rollouts per query. The single-rollout ablation collapses the group to 1.
  int effective_group_size() const { return use_group_computation ? group_size : 1; }

  std::vector<std::string> violations() const;
};

/// Number of tokens after splitting on ASCII whitespace.
std::size_t count_words(std::string_view text);

std::string mint_experience_id(std::int64_t number);
/// Numeric suffix of a "G<n>" id, or nothing for foreign ids such as "C1".
std::optional<std::int64_t> minted_id_number(std::string_view id);

std::vector<std::string> validate_library(const ExperienceLibrary& lib,
                                          int max_experience_words = 32);

// Checkpoint file: {"step", "next_id", "experiences": [{"id", "text",
// "created_step", "updated_step"}]}; entry order in the file is authoritative.
std::string library_to_json(const ExperienceLibrary& lib);
ExperienceLibrary library_from_json(std::string_view text);
void save_library(const ExperienceLibrary& lib, const std::filesystem::path& path);
ExperienceLibrary load_library(const std::filesystem::path& path);

}  // namespace tfgrpo
