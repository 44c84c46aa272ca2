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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tfgrpo/agent_runtime.hpp"
#include "tfgrpo/core_model.hpp"
#include "tfgrpo/learner.hpp"
#include "tfgrpo/reward_judge.hpp"

namespace tfgrpo {

/// JSONL, one `{"id", "problem", "answer": str|null, "domain"}` object per
/// line. Blank lines are skipped. Throws malformed_line (with the 1-based line
/// number) and duplicate_id.
std::vector<Query> load_dataset(const std::filesystem::path& path);
std::vector<Query> parse_dataset(std::string_view jsonl);

/// Uniform sample of n queries without replacement, deterministic in seed,
/// returned in dataset order. Throws n_too_large.
std::vector<Query> sample_subset(const std::vector<Query>& dataset, std::size_t n,
                                 std::uint64_t seed);

/// Unbiased integer in [0, bound) from a 64-bit engine by rejection.
std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound);

/// One graded rollout.
struct RunRecord {
  std::string query_id;
  int run = 0;
  double reward = 0.0;
  bool success = false;
  bool failed = false;  // gateway or grading failure; scored 0
  std::size_t tool_calls = 0;
};

struct QueryResult {
  std::string query_id;
  int successes = 0;
  int runs = 0;
  int failed_runs = 0;
  double avg_tool_calls = 0.0;
};

struct EvalReport {
  std::string dataset_id;
  int k = 0;
  std::vector<QueryResult> per_query;
  double mean_at_k = 0.0;
  double pass_at_k = 0.0;
  TokenUsage usage;
  std::vector<RunRecord> runs;
  std::optional<std::int64_t> library_step;
};

/// Aggregates a run log into per-query rows and Mean@k / pass@k. Queries
/// appear in first-seen order.
void summarize_runs(EvalReport& report);

std::string report_to_json(const EvalReport& report);

class Evaluator {
 public:
  Evaluator(Gateway& gateway, const AgentRunner& agent, RewardFn reward, int concurrency = 1);

  /// k independent rollouts per query. A run whose rollout lost its gateway
  /// or whose grading threw is scored 0 and flagged, never resampled.
  EvalReport evaluate(const std::vector<Query>& dataset, const ExperienceLibrary& lib,
                      const AgentMode& mode, int k, double temperature,
                      std::string dataset_id = "dataset") const;

 private:
  Gateway& gateway_;
  const AgentRunner& agent_;
  RewardFn reward_;
  int concurrency_;
};

/// Learning-curve CSV: one row per step record, joined with the report whose
/// library_step matches (eval cells empty when absent).
std::string curves_csv(std::span<const StepRecord> records, std::span<const EvalReport> reports);
void export_curves(std::span<const StepRecord> records, std::span<const EvalReport> reports,
                   const std::filesystem::path& path);

}  // namespace tfgrpo
