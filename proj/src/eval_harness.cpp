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

#include "tfgrpo/eval_harness.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "tfgrpo/error.hpp"
#include "tfgrpo/parallel.hpp"
#include "tfgrpo/text_util.hpp"

namespace tfgrpo {

using json = nlohmann::ordered_json;

std::vector<Query> parse_dataset(std::string_view jsonl) {
  std::vector<Query> out;
  std::set<std::string, std::less<>> seen;
  auto lines = split_lines(jsonl);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string lineno = std::to_string(i + 1);
    if (trim(lines[i]).empty()) continue;
    json doc = json::parse(lines[i], nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw Error(ErrorCode::malformed_line, "line " + lineno + ": not a JSON object");
    }
    auto need_string = [&](const char* key) {
      auto it = doc.find(key);
      if (it == doc.end() || !it->is_string()) {
        throw Error(ErrorCode::malformed_line,
                    "line " + lineno + ": missing string field '" + key + "'");
      }
      return it->get<std::string>();
    };
    Query q;
    q.id = need_string("id");
    q.problem_text = need_string("problem");
    if (auto it = doc.find("answer"); it != doc.end() && !it->is_null()) {
      if (it->is_string()) {
        q.ground_truth = it->get<std::string>();
      } else if (it->is_number()) {
        q.ground_truth = it->dump();
      } else {
        throw Error(ErrorCode::malformed_line, "line " + lineno + ": 'answer' must be a string or null");
      }
    }
    if (auto it = doc.find("domain"); it != doc.end() && !it->is_null()) {
      auto tag = it->is_string() ? parse_domain_tag(it->get<std::string>()) : std::nullopt;
      if (!tag) throw Error(ErrorCode::malformed_line, "line " + lineno + ": unknown domain");
      q.domain = *tag;
    }
    if (!seen.insert(q.id).second) {
      throw Error(ErrorCode::duplicate_id, "line " + lineno + ": id '" + q.id + "' repeats");
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Query> load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path));
}

std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::invalid_argument, "uniform_below needs a positive bound");
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    std::uint64_t x = engine();
    if (x < limit) return x % bound;
  }
}

std::vector<Query> sample_subset(const std::vector<Query>& dataset, std::size_t n,
                                 std::uint64_t seed) {
  if (n > dataset.size()) {
    throw Error(ErrorCode::n_too_large, "asked for " + std::to_string(n) + " of " +
                                            std::to_string(dataset.size()) + " queries");
  }
  std::vector<std::size_t> index(dataset.size());
  std::iota(index.begin(), index.end(), std::size_t{0});
  std::mt19937_64 engine(seed);
  // Partial Fisher-Yates: the first n slots are a uniform sample.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(uniform_below(engine, dataset.size() - i));
    std::swap(index[i], index[j]);
  }
  index.resize(n);
  std::sort(index.begin(), index.end());
  std::vector<Query> out;
  out.reserve(n);
  for (std::size_t i : index) out.push_back(dataset[i]);
  return out;
}

void summarize_runs(EvalReport& report) {
  report.per_query.clear();
  std::map<std::string, std::size_t, std::less<>> row_of;
  std::vector<std::size_t> tool_totals;
  for (const auto& run : report.runs) {
    auto [it, inserted] = row_of.try_emplace(run.query_id, report.per_query.size());
    if (inserted) {
      report.per_query.push_back({run.query_id, 0, 0, 0, 0.0});
      tool_totals.push_back(0);
    }
    auto& row = report.per_query[it->second];
    row.runs += 1;
    row.successes += run.success ? 1 : 0;
    row.failed_runs += run.failed ? 1 : 0;
    tool_totals[it->second] += run.tool_calls;
  }
  double mean_sum = 0.0;
  int solved = 0;
  for (std::size_t i = 0; i < report.per_query.size(); ++i) {
    auto& row = report.per_query[i];
    row.avg_tool_calls = static_cast<double>(tool_totals[i]) / row.runs;
    mean_sum += static_cast<double>(row.successes) / row.runs;
    solved += row.successes > 0 ? 1 : 0;
  }
  const double queries = static_cast<double>(report.per_query.size());
  report.mean_at_k = report.per_query.empty() ? 0.0 : mean_sum / queries;
  report.pass_at_k = report.per_query.empty() ? 0.0 : solved / queries;
}

std::string report_to_json(const EvalReport& report) {
  json doc;
  doc["dataset_id"] = report.dataset_id;
  doc["k"] = report.k;
  if (report.library_step) {
    doc["library_step"] = *report.library_step;
  } else {
    doc["library_step"] = nullptr;
  }
  doc["mean_at_k"] = report.mean_at_k;
  doc["pass_at_k"] = report.pass_at_k;
  doc["usage"] = {{"input_tokens", report.usage.input_tokens},
                  {"cached_input_tokens", report.usage.cached_input_tokens},
                  {"output_tokens", report.usage.output_tokens}};
  json rows = json::array();
  for (const auto& row : report.per_query) {
    rows.push_back({{"query_id", row.query_id},
                    {"successes", row.successes},
                    {"runs", row.runs},
                    {"failed_runs", row.failed_runs},
                    {"avg_tool_calls", row.avg_tool_calls}});
  }
  doc["per_query"] = std::move(rows);
  json runs = json::array();
  for (const auto& run : report.runs) {
    runs.push_back({{"query_id", run.query_id},
                    {"run", run.run},
                    {"reward", run.reward},
                    {"success", run.success},
                    {"failed", run.failed},
                    {"tool_calls", run.tool_calls}});
  }
  doc["runs"] = std::move(runs);
  return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

Evaluator::Evaluator(Gateway& gateway, const AgentRunner& agent, RewardFn reward, int concurrency)
    : gateway_(gateway), agent_(agent), reward_(std::move(reward)), concurrency_(concurrency) {}

EvalReport Evaluator::evaluate(const std::vector<Query>& dataset, const ExperienceLibrary& lib,
                               const AgentMode& mode, int k, double temperature,
                               std::string dataset_id) const {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be at least 1");
  EvalReport report;
  report.dataset_id = std::move(dataset_id);
  report.k = k;
  report.library_step = lib.step;
  const std::size_t runs_per_query = static_cast<std::size_t>(k);
  report.runs.resize(dataset.size() * runs_per_query);
  const TokenUsage before = gateway_.total_usage();

  parallel_for(report.runs.size(), concurrency_, [&](std::size_t i) {
    const Query& q = dataset[i / runs_per_query];
    RunRecord& run = report.runs[i];
    run.query_id = q.id;
    run.run = static_cast<int>(i % runs_per_query) + 1;
    Trajectory traj = agent_.run_rollout(q, lib, mode, temperature);
    run.tool_calls = traj.tool_calls.size();
    if (traj.terminated_reason == TerminationReason::gateway_error) {
      run.failed = true;
      return;
    }
    try {
      Reward reward = reward_(q, traj);
      run.reward = reward.value;
      run.success = reward.value >= 1.0;
    } catch (const Error& e) {
      spdlog::warn("eval[{} run {}]: grading failed: {}", q.id, run.run, e.what());
      run.failed = true;
    }
  });

  report.usage = gateway_.total_usage() - before;
  summarize_runs(report);
  return report;
}

std::string curves_csv(std::span<const StepRecord> records, std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << "step,epoch,batch,mean_train_reward,avg_tool_calls,library_size,eval_dataset,eval_k,"
         "mean_at_k,pass_at_k\n";
  out.setf(std::ios::fixed);
  out.precision(6);
  for (const auto& r : records) {
    out << r.step << ',' << r.epoch << ',' << r.batch << ',' << r.mean_train_reward << ','
        << r.avg_tool_calls << ',' << r.library_size_after << ',';
    auto match = std::find_if(reports.begin(), reports.end(), [&](const EvalReport& e) {
      return e.library_step && *e.library_step == r.step;
    });
    if (match != reports.end()) {
      out << match->dataset_id << ',' << match->k << ',' << match->mean_at_k << ','
          << match->pass_at_k;
    } else {
      out << ",,,";
    }
    out << '\n';
  }
  return out.str();
}

void export_curves(std::span<const StepRecord> records, std::span<const EvalReport> reports,
                   const std::filesystem::path& path) {
  write_file_atomic(path, curves_csv(records, reports));
}

}  // namespace tfgrpo
