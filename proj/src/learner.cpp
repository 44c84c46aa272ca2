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

#include "tfgrpo/learner.hpp"

#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "tfgrpo/error.hpp"
#include "tfgrpo/parallel.hpp"
#include "tfgrpo/prompt_kit.hpp"
#include "tfgrpo/text_util.hpp"

namespace tfgrpo {

namespace {

constexpr int kLearnMaxOutputTokens = 8192;

ChatRequest learn_request(std::string prompt, std::string tag, const LearnConfig& cfg) {
  ChatRequest request;
  request.messages.push_back({Role::user, std::move(prompt)});
  request.temperature = cfg.learn_temperature;
  request.max_output_tokens = kLearnMaxOutputTokens;
  request.request_tag = std::move(tag);
  return request;
}

// Sends `request`; on parse failure re-asks once with the corrective suffix.
template <typename Parse>
auto complete_with_reprompt(Gateway& gateway, ChatRequest request, TemplateName corrective,
                            Parse&& parse) {
  ChatResponse first = gateway.complete(request);
  try {
    return parse(first.content);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::parse_failure) throw;
  }
  request.messages.push_back({Role::assistant, first.content});
  request.messages.push_back({Role::user, std::string(embedded_body(corrective))});
  ChatResponse second = gateway.complete(request);
  return parse(second.content);
}

bool is_success(const Reward& reward) { return reward.value >= 1.0; }

}  // namespace

std::string checkpoint_file_name(std::int64_t step) {
  return "library_step_" + std::to_string(step) + ".json";
}

TrajectorySummary summarize_trajectory(Gateway& gateway, const Query& query,
                                       const GroupMember& member, std::size_t member_index,
                                       const LearnConfig& cfg) {
  Template tmpl = Template::builtin(TemplateName::summary);
  Bindings bindings{{"trajectory", render_trajectory(member.trajectory)}};
  if (cfg.use_ground_truth) {
    bindings["evaluation"] = is_success(member.reward) ? "correct" : "incorrect";
    bindings["groundtruth"] = query.ground_truth.value_or("");
  } else {
    tmpl = tmpl.without_blocks({"evaluation", "groundtruth"});
  }
  ChatResponse reply =
      gateway.complete(learn_request(tmpl.render(bindings), "summary", cfg));
  std::string text(trim(reply.content));
  if (text.empty()) text = "(empty summary)";
  return TrajectorySummary{query.id, member_index, std::move(text)};
}

SemanticAdvantage extract_advantage(Gateway& gateway, const Query& query,
                                    const RolloutGroup& group,
                                    std::span<const TrajectorySummary> summaries,
                                    const ExperienceLibrary& lib, const LearnConfig& cfg) {
  (void)group;
  Template tmpl = Template::builtin(TemplateName::group_advantage);
  Bindings bindings{{"max_operations", std::to_string(cfg.max_ops_per_group)},
                    {"problem", query.problem_text},
                    {"trajectories", render_summaries(summaries)},
                    {"experiences", serialize_library_with_ids(lib)}};
  if (cfg.use_ground_truth) {
    bindings["groundtruth"] = query.ground_truth.value_or("");
  } else {
    tmpl = tmpl.without_blocks({"groundtruth"});
  }
  ParsedOps parsed = complete_with_reprompt(
      gateway, learn_request(tmpl.render(bindings), "extract", cfg), TemplateName::reprompt_json,
      [](const std::string& content) { return parse_op_list(content); });
  for (const auto& raw : parsed.rejected) {
    spdlog::warn("extract[{}]: dropped unrecognized operation {}", query.id, raw);
  }
  SemanticAdvantage advantage{query.id, std::move(parsed.rationale), std::move(parsed.ops)};
  if (advantage.ops.size() > static_cast<std::size_t>(cfg.max_ops_per_group)) {
    advantage.ops.resize(static_cast<std::size_t>(cfg.max_ops_per_group));
  }
  return advantage;
}

OptimizeResult optimize_library(Gateway& gateway, const ExperienceLibrary& lib,
                                std::span<const SemanticAdvantage> advantages,
                                const LearnConfig& cfg) {
  if (advantages.empty()) return OptimizeResult{lib, {}, {}};
  std::string prompt = Template::builtin(TemplateName::optimization)
                           .render({{"experiences", serialize_library_with_ids(lib)},
                                    {"suggested_updates", render_suggestions(advantages)}});
  ParsedOps parsed = complete_with_reprompt(
      gateway, learn_request(std::move(prompt), "optimize", cfg), TemplateName::reprompt_json,
      [](const std::string& content) { return parse_op_list(content); });
  OptimizeResult result = apply_ops(lib, parsed.ops, cfg.max_experience_words);
  for (const auto& raw : parsed.rejected) {
    LibraryOp unknown;
    result.rejected.push_back({unknown, "unrecognized operation " + raw});
  }
  return result;
}

ExperienceLibrary generate_direct_experiences(Gateway& gateway, int n, DomainTag domain,
                                              const LearnConfig& cfg) {
  ExperienceLibrary lib;
  if (n <= 0) return lib;
  std::string prompt = Template::builtin(TemplateName::direct_experiences)
                           .render({{"domain", std::string(to_string(domain))},
                                    {"count", std::to_string(n)},
                                    {"max_words", std::to_string(cfg.max_experience_words)}});
  auto parse = [&](const std::string& content) {
    // A reply with list-marked lines keeps only those; preamble prose is dropped.
    std::vector<std::pair<std::string, bool>> candidates;
    bool any_marked = false;
    for (const auto& raw : split_lines(content)) {
      std::string_view line = trim(raw);
      std::size_t before = line.size();
      // Strip list markers: "[3].", "3.", "3)", "-", "*".
      if (!line.empty() && line.front() == '[') {
        auto close = line.find(']');
        if (close != std::string_view::npos) line = line.substr(close + 1);
        if (!line.empty() && line.front() == '.') line.remove_prefix(1);
      } else {
        std::size_t digits = 0;
        while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
        if (digits > 0 && digits < line.size() && (line[digits] == '.' || line[digits] == ')')) {
          line.remove_prefix(digits + 1);
        } else if (!line.empty() && (line.front() == '-' || line.front() == '*')) {
          line.remove_prefix(1);
        }
      }
      std::string text = normalize_experience_text(line);
      if (text.empty()) continue;
      const bool marked = line.size() != before;
      any_marked = any_marked || marked;
      candidates.emplace_back(std::move(text), marked);
    }
    std::vector<std::string> kept;
    for (auto& [text, marked] : candidates) {
      if (any_marked && !marked) continue;
      if (count_words(text) > static_cast<std::size_t>(cfg.max_experience_words)) {
        spdlog::warn("baseline: rejected experience over {} words", cfg.max_experience_words);
        continue;
      }
      kept.push_back(std::move(text));
    }
    if (kept.empty()) throw Error(ErrorCode::parse_failure, "no usable experience lines");
    return kept;
  };
  auto lines = complete_with_reprompt(gateway, learn_request(std::move(prompt), "baseline", cfg),
                                      TemplateName::reprompt_lines, parse);
  for (const auto& text : lines) {
    if (lib.size() >= static_cast<std::size_t>(n)) break;
    lib.entries.push_back({mint_experience_id(lib.next_id), text, 0, 0});
    ++lib.next_id;
  }
  return lib;
}

// ---------------------------------------------------------------------------
// Learner

Learner::Learner(Gateway& gateway, const AgentRunner& agent, RewardFn reward, AgentMode mode,
                 LearnConfig cfg, LearnerOptions options)
    : gateway_(gateway),
      agent_(agent),
      reward_(std::move(reward)),
      mode_(std::move(mode)),
      cfg_(cfg),
      options_(std::move(options)) {}

LearnResult Learner::learn(const std::vector<Query>& dataset, ExperienceLibrary initial) {
  if (dataset.empty()) throw Error(ErrorCode::invalid_argument, "dataset is empty");
  if (auto bad = cfg_.violations(); !bad.empty()) throw Error(ErrorCode::config_invalid, bad.front());

  LearnResult result;
  result.library = std::move(initial);
  auto note = [&](std::string event) {
    spdlog::info("{}", event);
    result.events.push_back(std::move(event));
  };

  const std::size_t batch_count =
      std::min<std::size_t>(static_cast<std::size_t>(cfg_.batches_per_epoch), dataset.size());
  const std::size_t group_size = static_cast<std::size_t>(cfg_.effective_group_size());

  for (int epoch = 1; epoch <= cfg_.epochs; ++epoch) {
    for (std::size_t b = 0; b < batch_count; ++b) {
      // Contiguous, near-equal partition of the dataset.
      const std::size_t lo = dataset.size() * b / batch_count;
      const std::size_t hi = dataset.size() * (b + 1) / batch_count;
      const std::vector<Query> batch(dataset.begin() + static_cast<std::ptrdiff_t>(lo),
                                     dataset.begin() + static_cast<std::ptrdiff_t>(hi));
      const TokenUsage usage_before = gateway_.total_usage();
      const ExperienceLibrary snapshot = result.library;

      std::vector<RolloutGroup> groups(batch.size());
      for (std::size_t q = 0; q < batch.size(); ++q) {
        groups[q].query = batch[q];
        groups[q].members.resize(group_size);
        groups[q].library_snapshot_step = snapshot.step;
      }
      parallel_for(batch.size() * group_size, cfg_.concurrency, [&](std::size_t i) {
        auto& group = groups[i / group_size];
        auto& member = group.members[i % group_size];
        member.trajectory = agent_.run_rollout(group.query, snapshot, mode_, cfg_.learn_temperature);
        member.reward = cfg_.use_ground_truth
                            ? reward_(group.query, member.trajectory)
                            : Reward{0.0, std::string(kUngradedGraderId), "ungraded"};
      });

      for (const auto& group : groups) {
        for (const auto& m : group.members) {
          if (m.trajectory.terminated_reason == TerminationReason::gateway_error) {
            throw Error(ErrorCode::gateway_error,
                        "step " + std::to_string(snapshot.step + 1) + ": rollout for " +
                            group.query.id + " lost its gateway; batch discarded");
          }
        }
      }

      std::vector<std::size_t> eligible;
      double reward_sum = 0.0;
      std::size_t tool_calls = 0;
      for (std::size_t q = 0; q < groups.size(); ++q) {
        for (const auto& m : groups[q].members) {
          reward_sum += m.reward.value;
          tool_calls += m.trajectory.tool_calls.size();
        }
        auto rewards = groups[q].rewards();
        GroupStats stats = group_stats(rewards);
        // Without ground truth every reward is 0; every group is a candidate.
        if (!cfg_.use_ground_truth || should_extract(stats, cfg_)) eligible.push_back(q);
      }

      std::vector<std::vector<TrajectorySummary>> summaries(eligible.size());
      for (auto& s : summaries) s.resize(group_size);
      parallel_for(eligible.size() * group_size, cfg_.concurrency, [&](std::size_t i) {
        const auto& group = groups[eligible[i / group_size]];
        summaries[i / group_size][i % group_size] = summarize_trajectory(
            gateway_, group.query, group.members[i % group_size], i % group_size, cfg_);
      });

      std::vector<std::optional<SemanticAdvantage>> extracted(eligible.size());
      parallel_for(eligible.size(), cfg_.concurrency, [&](std::size_t i) {
        const auto& group = groups[eligible[i]];
        try {
          extracted[i] = extract_advantage(gateway_, group.query, group, summaries[i], snapshot, cfg_);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::parse_failure) throw;
        }
      });
      std::vector<SemanticAdvantage> advantages;
      for (std::size_t i = 0; i < extracted.size(); ++i) {
        if (extracted[i]) {
          advantages.push_back(std::move(*extracted[i]));
        } else {
          note("step " + std::to_string(snapshot.step + 1) + ": extraction for " +
               groups[eligible[i]].query.id + " unparseable, group skipped");
        }
      }

      OptimizeResult optimized{result.library, {}, {}};
      try {
        optimized = optimize_library(gateway_, result.library, advantages, cfg_);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::parse_failure) throw;
        note("step " + std::to_string(snapshot.step + 1) +
             ": optimization reply unparseable, library unchanged");
      }
      for (const auto& rejected : optimized.rejected) {
        note("step " + std::to_string(snapshot.step + 1) + ": rejected " +
             std::string(to_string(rejected.op.kind)) + " (" + rejected.reason + ")");
      }
      result.library = std::move(optimized.library);
      result.library.step = snapshot.step + 1;

      const double rollouts = static_cast<double>(batch.size() * group_size);
      StepRecord record;
      record.step = result.library.step;
      record.epoch = epoch;
      record.batch = static_cast<int>(b) + 1;
      record.mean_train_reward = reward_sum / rollouts;
      record.groups_total = static_cast<int>(groups.size());
      record.groups_extracted = static_cast<int>(advantages.size());
      record.ops_applied = static_cast<int>(optimized.applied.size());
      record.ops_rejected = static_cast<int>(optimized.rejected.size());
      record.library_size_after = static_cast<int>(result.library.size());
      record.avg_tool_calls = static_cast<double>(tool_calls) / rollouts;
      record.usage = gateway_.total_usage() - usage_before;
      result.records.push_back(record);

      if (options_.checkpoint_dir) {
        save_library(result.library, *options_.checkpoint_dir / checkpoint_file_name(record.step));
      }
      if (options_.on_step) options_.on_step(record, result.library);
    }
  }
  return result;
}

std::string step_records_csv(std::span<const StepRecord> records) {
  std::ostringstream out;
  out << "step,epoch,batch,mean_train_reward,groups_total,groups_extracted,ops_applied,"
         "ops_rejected,library_size_after,avg_tool_calls,input_tokens,cached_input_tokens,"
         "output_tokens\n";
  out.setf(std::ios::fixed);
  out.precision(6);
  for (const auto& r : records) {
    out << r.step << ',' << r.epoch << ',' << r.batch << ',' << r.mean_train_reward << ','
        << r.groups_total << ',' << r.groups_extracted << ',' << r.ops_applied << ','
        << r.ops_rejected << ',' << r.library_size_after << ',' << r.avg_tool_calls << ','
        << r.usage.input_tokens << ',' << r.usage.cached_input_tokens << ','
        << r.usage.output_tokens << '\n';
  }
  return out.str();
}

}  // namespace tfgrpo
