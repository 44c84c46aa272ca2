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

// Acceptance suite: one PASS/FAIL line per criterion; nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "../common/scripted_policy.hpp"
#include "../unit/test_support.hpp"
#include "tfgrpo/agent_runtime.hpp"
#include "tfgrpo/cli.hpp"
#include "tfgrpo/error.hpp"
#include "tfgrpo/eval_harness.hpp"
#include "tfgrpo/learner.hpp"
#include "tfgrpo/prompt_kit.hpp"
#include "tfgrpo/reward_judge.hpp"
#include "tfgrpo/text_util.hpp"

using namespace tfgrpo;
using tfgrpo::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

// ---------------------------------------------------------------------------

Verdict golden_learn() {
  Verdict v;
  const fs::path golden = tfgrpo::testing::source_dir() / "tests/golden/sample_learn";
  TempDir dir;
  fs::copy(tfgrpo::testing::source_dir() / "data/sample", dir.path(), fs::copy_options::recursive);
  double slowest = 0.0;
  for (int run = 1; run <= 2; ++run) {
    const fs::path out = dir / ("run" + std::to_string(run));
    const std::string config = (dir / "learn_config.json").string();
    const std::string out_arg = out.string();
    const char* argv[] = {"tfgrpo", "learn", "--config", config.c_str(), "--out", out_arg.c_str()};
    std::ostringstream sout, serr;
    auto t0 = std::chrono::steady_clock::now();
    int code = run_cli(6, argv, sout, serr);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    slowest = std::max(slowest, secs);
    if (code != kExitOk) {
      v.fail("run " + std::to_string(run) + " exited " + std::to_string(code) + ": " + serr.str());
      continue;
    }
    if (secs >= 10.0) v.fail("run " + std::to_string(run) + " took " + std::to_string(secs) + " s");
    int checkpoints = 0;
    for (const auto& entry : fs::directory_iterator(out)) {
      const std::string name = entry.path().filename().string();
      if (name.starts_with("library_step_")) ++checkpoints;
    }
    if (checkpoints != 3) v.fail(std::to_string(checkpoints) + " checkpoints");
    auto rows = split_lines(read_file(out / "metrics.csv"));
    if (rows.size() != 4) v.fail(std::to_string(rows.size() - 1) + " step records");
    for (const auto& entry : fs::directory_iterator(golden)) {
      const std::string name = entry.path().filename().string();
      if (!fs::exists(out / name) || read_file(out / name) != read_file(entry.path())) {
        v.fail("run " + std::to_string(run) + ": " + name + " differs from golden");
      }
    }
  }
  if (v.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "2 runs byte-identical to goldens, slowest %.3f s", slowest);
    v.detail = buf;
  }
  return v;
}

// ---------------------------------------------------------------------------

Verdict learning_dynamics() {
  Verdict v;
  auto backend = std::make_shared<FunctionBackend>(tfgrpo::testing::HintPolicy(5));
  Gateway gateway(backend);
  ToolBelt belt;
  belt.code = std::make_shared<ScriptedInterpreter>();
  AgentRunner agent(gateway, belt);
  LearnConfig cfg;
  cfg.epochs = 3;
  cfg.group_size = 5;
  std::vector<Query> data{{"d1", "What is 6 * 7?", "42", DomainTag::math},
                          {"d2", "What is 84 / 2?", "42", DomainTag::math}};
  Learner learner(gateway, agent, math_reward(), AgentMode::react(), cfg);
  LearnResult res = learner.learn(data);

  // Hand trace: step s runs under s - 1 hints, so 1 + (s - 1) of 5 members
  // succeed and each rollout makes 3 - (s - 1) code calls.
  const std::vector<double> want_reward{0.2, 0.4, 0.6};
  const std::vector<double> want_tools{3.0, 2.0, 1.0};
  if (res.records.size() != 3) {
    v.fail(std::to_string(res.records.size()) + " records");
    return v;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& r = res.records[i];
    if (std::abs(r.mean_train_reward - want_reward[i]) > 1e-12) {
      v.fail("step " + std::to_string(i + 1) + " reward " + std::to_string(r.mean_train_reward));
    }
    if (std::abs(r.avg_tool_calls - want_tools[i]) > 1e-12) {
      v.fail("step " + std::to_string(i + 1) + " tool calls " + std::to_string(r.avg_tool_calls));
    }
    if (r.library_size_after != static_cast<int>(i) + 1) v.fail("library size at step " + std::to_string(i + 1));
    if (i > 0 && !(r.mean_train_reward > res.records[i - 1].mean_train_reward)) v.fail("reward not increasing");
    if (i > 0 && !(r.avg_tool_calls < res.records[i - 1].avg_tool_calls)) v.fail("tool calls not decreasing");
  }
  if (v.pass) v.detail = "reward 0.2 -> 0.4 -> 0.6, tool calls 3 -> 2 -> 1";
  return v;
}

// ---------------------------------------------------------------------------

Verdict degenerate_filter() {
  Verdict v;
  const std::string right = "<answer>\\boxed{42}</answer>";
  const std::string wrong = "<answer>\\boxed{0}</answer>";
  // q1 all right, q2 mixed, q3 all wrong, q4 mixed.
  const std::vector<std::vector<bool>> plan{{1, 1, 1, 1, 1}, {1, 0, 1, 0, 0}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 1}};
  std::vector<ScriptEntry> script;
  for (const auto& row : plan) {
    for (bool ok : row) script.push_back({"rollout", ok ? right : wrong});
  }
  for (int i = 0; i < 10; ++i) script.push_back({"summary", "1. The agent answered."});
  for (int i = 0; i < 2; ++i) script.push_back({"extract", "```json\n[{\"option\": \"add\", \"experience\": \"Recheck.\"}]\n```"});
  script.push_back({"optimize", "```json\n[{\"option\": \"add\", \"experience\": \"Recheck.\"}]\n```"});
  auto mock = std::make_shared<MockBackend>(script);
  Gateway gateway(mock);
  AgentRunner agent(gateway, ToolBelt{});
  LearnConfig cfg;
  cfg.epochs = 1;
  cfg.group_size = 5;
  std::vector<Query> data;
  for (int q = 1; q <= 4; ++q) {
    data.push_back({"q" + std::to_string(q), "Problem number " + std::to_string(q) + " asks for 42.", "42",
                    DomainTag::math});
  }
  Learner learner(gateway, agent, math_reward(), AgentMode::direct(), cfg);
  LearnResult res = learner.learn(data);

  std::map<std::string, std::map<std::string, int>> calls;  // tag -> query -> count
  for (const auto& req : mock->requests()) {
    if (req.request_tag != "summary" && req.request_tag != "extract") continue;
    const std::string& prompt = req.messages.front().content;
    int owners = 0;
    for (const auto& q : data) {
      if (prompt.find(q.problem_text) != std::string::npos) {
        ++calls[req.request_tag][q.id];
        ++owners;
      }
    }
    if (owners != 1) v.fail(req.request_tag + " prompt names " + std::to_string(owners) + " problems");
  }
  const std::map<std::string, int> want_summary{{"q2", 5}, {"q4", 5}};
  const std::map<std::string, int> want_extract{{"q2", 1}, {"q4", 1}};
  if (calls["summary"] != want_summary) v.fail("summary calls do not match the mixed groups");
  if (calls["extract"] != want_extract) v.fail("extract calls do not match the mixed groups");
  if (res.records.at(0).groups_extracted != 2) v.fail("groups_extracted != 2");
  if (v.pass) v.detail = "summary 5+5 and extract 1+1 for q2/q4; none for q1/q3";
  return v;
}

// ---------------------------------------------------------------------------

Verdict advantage_math() {
  Verdict v;
  std::mt19937_64 rng(20251019);
  int degenerate = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int g = 2 + static_cast<int>(rng() % 7);
    // Rewards are n_i / d with integer n_i so the oracle stays exact:
    // mean = S / (g d), advantage_i = (g n_i - S) / sqrt(g Q - S^2).
    const std::int64_t d = 1 + static_cast<std::int64_t>(rng() % 8);
    const bool force_flat = rng() % 10 == 0;
    std::vector<std::int64_t> n(g);
    for (auto& x : n) x = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(d + 1));
    if (force_flat) std::fill(n.begin(), n.end(), n[0]);
    std::vector<double> rewards;
    for (auto x : n) rewards.push_back(static_cast<double>(x) / static_cast<double>(d));

    std::int64_t s = 0, q = 0;
    for (auto x : n) {
      s += x;
      q += x * x;
    }
    const std::int64_t spread = g * q - s * s;
    const bool flat = spread == 0;
    GroupStats stats = group_stats(rewards);
    if (stats.degenerate != flat) {
      v.fail("trial " + std::to_string(trial) + ": degenerate flag wrong");
      continue;
    }
    if (flat) {
      ++degenerate;
      for (double a : stats.advantages) {
        if (a != 0.0) v.fail("trial " + std::to_string(trial) + ": nonzero advantage in flat group");
      }
      continue;
    }
    const long double root = std::sqrt(static_cast<long double>(spread));
    long double sum = 0, sq = 0;
    for (int i = 0; i < g; ++i) {
      const long double exact = static_cast<long double>(g * n[i] - s) / root;
      if (std::fabs(static_cast<long double>(stats.advantages[i]) - exact) > 1e-9L) {
        v.fail("trial " + std::to_string(trial) + ": advantage off oracle");
      }
      sum += stats.advantages[i];
      sq += static_cast<long double>(stats.advantages[i]) * stats.advantages[i];
    }
    const long double mean = sum / g;
    const long double sd = std::sqrt(sq / g - mean * mean);
    if (std::fabs(mean) > 1e-9L || std::fabs(sd - 1.0L) > 1e-9L) {
      v.fail("trial " + std::to_string(trial) + ": mean/std not 0/1");
    }
  }
  if (v.pass) v.detail = "1000 vectors, " + std::to_string(degenerate) + " degenerate, all within 1e-9";
  return v;
}

// ---------------------------------------------------------------------------

/// Independent model of the library operation semantics.
struct RefLibrary {
  struct Entry {
    std::string id, text;
    std::int64_t created, updated;
  };
  std::vector<Entry> entries;
  std::int64_t next = 1;
  std::int64_t step = 0;

  Entry* find(const std::string& id) {
    for (auto& e : entries) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }
  static std::string norm(const std::string& t) {
    std::istringstream in(t);
    std::string w, out;
    while (in >> w) out += (out.empty() ? "" : " ") + w;
    return out;
  }
  static bool text_ok(const std::string& t) {
    std::istringstream in(t);
    std::string w;
    int n = 0;
    while (in >> w) ++n;
    return n >= 1 && n <= 32;
  }
  bool apply(const LibraryOp& op, std::int64_t at) {
    const std::string t = op.text ? norm(*op.text) : "";
    switch (op.kind) {
      case OpKind::keep: return true;
      case OpKind::add:
        if (!text_ok(t)) return false;
        entries.push_back({"G" + std::to_string(next++), t, at, at});
        return true;
      case OpKind::del: {
        if (!find(*op.target_id)) return false;
        std::erase_if(entries, [&](const Entry& e) { return e.id == *op.target_id; });
        return true;
      }
      case OpKind::modify: {
        Entry* e = find(*op.target_id);
        if (!e || !text_ok(t)) return false;
        e->text = t;
        e->updated = at;
        return true;
      }
      case OpKind::merge: {
        const auto& ids = *op.merged_from;
        if (ids.size() < 2 || std::set<std::string>(ids.begin(), ids.end()).size() != ids.size()) return false;
        for (const auto& id : ids) {
          if (!find(id)) return false;
        }
        if (!text_ok(t)) return false;
        for (const auto& id : ids) std::erase_if(entries, [&](const Entry& e) { return e.id == id; });
        entries.push_back({"G" + std::to_string(next++), t, at, at});
        return true;
      }
    }
    return false;
  }
};

Verdict operation_calculus() {
  Verdict v;
  std::mt19937_64 rng(77);
  const std::vector<std::string> words{"check", "units", "verify", "the", "answer", "use", "a", "table",
                                       "draw", "diagram", "simplify", "first"};
  auto text = [&](int count) {
    std::string out;
    for (int i = 0; i < count; ++i) out += words[rng() % words.size()] + (rng() % 5 == 0 ? "  " : " ");
    return out;
  };
  auto some_id = [&](std::int64_t next) {
    // Mostly plausible ids, sometimes never-minted or foreign ones.
    const std::uint64_t roll = rng() % 10;
    if (roll == 0) return std::string("C") + std::to_string(rng() % 5);
    if (roll == 1) return "G" + std::to_string(next + static_cast<std::int64_t>(rng() % 5));
    return "G" + std::to_string(1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(next)));
  };

  int sequences = 0, total_applied = 0, total_rejected = 0;
  for (int seq = 0; seq < 40; ++seq) {
    ExperienceLibrary lib;
    RefLibrary ref;
    std::set<std::string> ever_minted;
    int emitted = 0;
    while (emitted < 200) {
      const int chunk = std::min(200 - emitted, 1 + static_cast<int>(rng() % 25));
      std::vector<LibraryOp> ops;
      for (int i = 0; i < chunk; ++i) {
        const std::int64_t next = lib.next_id;
        switch (rng() % 6) {
          case 0: ops.push_back(LibraryOp::add(text(rng() % 8 == 0 ? 33 + rng() % 5 : 1 + rng() % 12))); break;
          case 1: ops.push_back(LibraryOp::add(rng() % 10 == 0 ? "   " : text(1 + rng() % 32))); break;
          case 2: ops.push_back(LibraryOp::remove(some_id(next))); break;
          case 3: ops.push_back(LibraryOp::modify(some_id(next), text(rng() % 9 == 0 ? 40 : 1 + rng() % 10))); break;
          case 4: {
            std::vector<std::string> ids;
            const int arity = 1 + static_cast<int>(rng() % 3);
            for (int k = 0; k < arity; ++k) ids.push_back(some_id(next));
            ops.push_back(LibraryOp::merge(ids, text(1 + rng() % 10)));
            break;
          }
          default: ops.push_back(LibraryOp::keep()); break;
        }
      }
      emitted += chunk;

      auto mock = std::make_shared<MockBackend>(
          std::vector<ScriptEntry>{{"optimize", "```json\n" + ops_to_json(ops) + "\n```"}});
      Gateway gateway(mock);
      std::vector<SemanticAdvantage> advantages{{"q", "", {LibraryOp::keep()}}};
      const std::set<std::string> before_ids = [&] {
        std::set<std::string> s;
        for (const auto& e : lib.entries) s.insert(e.id);
        return s;
      }();
      OptimizeResult res = optimize_library(gateway, lib, advantages, LearnConfig{});

      ++ref.step;
      int ref_applied = 0;
      for (const auto& op : ops) ref_applied += ref.apply(op, ref.step) ? 1 : 0;

      lib = res.library;
      total_applied += static_cast<int>(res.applied.size());
      total_rejected += static_cast<int>(res.rejected.size());
      if (static_cast<int>(res.applied.size()) != ref_applied ||
          res.applied.size() + res.rejected.size() != ops.size()) {
        v.fail("seq " + std::to_string(seq) + ": applied count differs from reference");
      }
      if (lib.step != ref.step || lib.next_id != ref.next || lib.entries.size() != ref.entries.size()) {
        v.fail("seq " + std::to_string(seq) + ": library shape differs from reference");
        break;
      }
      for (std::size_t i = 0; i < lib.entries.size(); ++i) {
        const auto& a = lib.entries[i];
        const auto& b = ref.entries[i];
        if (a.id != b.id || a.text != b.text || a.created_step != b.created || a.updated_step != b.updated) {
          v.fail("seq " + std::to_string(seq) + ": entry " + a.id + " differs from reference");
        }
      }
      // Invariants.
      if (!validate_library(lib).empty()) v.fail("seq " + std::to_string(seq) + ": " + validate_library(lib).front());
      std::set<std::string> ids;
      for (const auto& e : lib.entries) {
        if (!ids.insert(e.id).second) v.fail("duplicate id " + e.id);
        if (count_words(e.text) > 32) v.fail("word cap broken by " + e.id);
        if (!(e.created_step <= e.updated_step && e.updated_step <= lib.step)) v.fail("step stamps out of order");
        if (!before_ids.contains(e.id) && ever_minted.contains(e.id)) v.fail("id reused: " + e.id);
        if (auto num = minted_id_number(e.id); !num || *num >= lib.next_id) v.fail("id beyond next_id");
      }
      for (const auto& id : ids) ever_minted.insert(id);
    }
    ++sequences;
  }
  if (v.pass) {
    v.detail = std::to_string(sequences) + " sequences x 200 ops, " + std::to_string(total_applied) +
               " applied / " + std::to_string(total_rejected) + " rejected, reference-equal";
  }
  return v;
}

// ---------------------------------------------------------------------------

Verdict metrics_oracle() {
  Verdict v;
  std::mt19937_64 rng(4242);
  const int queries = 20, k = 8, fixtures = 25;
  for (int f = 0; f < fixtures; ++f) {
    std::vector<std::vector<bool>> outcome(queries, std::vector<bool>(k));
    const double p = static_cast<double>(rng() % 11) / 10.0;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (auto& row : outcome) {
      for (std::size_t j = 0; j < row.size(); ++j) row[j] = coin(rng) < p;
    }
    std::vector<Query> data;
    for (int q = 0; q < queries; ++q) data.push_back({"m" + std::to_string(q), "Task " + std::to_string(q), "1", DomainTag::math});

    std::mutex mu;
    std::map<std::string, int> served;
    auto backend = std::make_shared<FunctionBackend>([&](const ChatRequest& req) {
      const std::string& prompt = req.messages.at(1).content;
      int q = -1;
      for (int i = queries - 1; i >= 0 && q < 0; --i) {
        if (prompt.find("Task " + std::to_string(i)) != std::string::npos) q = i;
      }
      int j;
      {
        std::lock_guard lock(mu);
        j = served[data[q].id]++;
      }
      return outcome[q][j] ? std::string("<answer>\\boxed{1}</answer>") : std::string("<answer>\\boxed{0}</answer>");
    });
    Gateway gateway(backend);
    AgentRunner agent(gateway, ToolBelt{});
    Evaluator evaluator(gateway, agent, math_reward(), 4);
    EvalReport report = evaluator.evaluate(data, ExperienceLibrary{}, AgentMode::direct(), k, 0.3, "fixture");

    // Brute-force recount.
    int solved = 0;
    long successes = 0;
    for (const auto& row : outcome) {
      int s = 0;
      for (bool b : row) s += b ? 1 : 0;
      successes += s;
      solved += s > 0 ? 1 : 0;
    }
    const double mean = static_cast<double>(successes) / (queries * k);
    const double pass = static_cast<double>(solved) / queries;
    if (std::abs(report.mean_at_k - mean) > 1e-12 || std::abs(report.pass_at_k - pass) > 1e-12) {
      v.fail("fixture " + std::to_string(f) + ": report differs from recount");
    }
    if (report.pass_at_k < report.mean_at_k) v.fail("fixture " + std::to_string(f) + ": pass@k < mean@k");
  }
  if (v.pass) v.detail = std::to_string(fixtures) + " fixtures of 20 x k=8 match recount; pass@k >= mean@k";
  return v;
}

// ---------------------------------------------------------------------------

Verdict prompt_fidelity() {
  Verdict v;
  const std::map<TemplateName, std::string> pinned{
      {TemplateName::react_system, "c166004481bd7aaa580addabd7c13581ced50f6ddf2bb42bb4636c77acff4d24"},
      {TemplateName::experience_injection, "a0fd60fc8abc3be5efd64d28705eee6cc9281adfd320efa0102e537f2dbf72df"},
      {TemplateName::summary, "d9bcddb27c5cacd0a5dc41e469ff8830a5e816685a7426fc134fbe7e617aa7c5"},
      {TemplateName::group_advantage, "459e467454144a6fcad280e080cea1e9cd2e02804e71b9923cfbe87aa2c3e4c9"},
      {TemplateName::optimization, "dff067d1029dc36aa196368dfe6581b17f74414926dbd671466781113e7dbb07"},
  };
  if (method_templates().size() != pinned.size()) v.fail("method template count changed");
  for (auto name : method_templates()) {
    auto it = pinned.find(name);
    if (it == pinned.end() || sha256_hex(embedded_body(name)) != it->second) {
      v.fail(template_file_name(name) + " digest mismatch");
    }
  }

  auto mock = std::make_shared<MockBackend>(std::vector<ScriptEntry>{{"extract", "```json\n[]\n```"}});
  Gateway gateway(mock);
  RolloutGroup group;
  group.query = {"p1", "Find x.", "3", DomainTag::math};
  group.members.resize(3);
  std::vector<TrajectorySummary> summaries{{"p1", 0, "alpha summary text"},
                                           {"p1", 1, "beta summary text"},
                                           {"p1", 2, "gamma summary text"}};
  extract_advantage(gateway, group.query, group, summaries, ExperienceLibrary{}, LearnConfig{});
  const std::string prompt = mock->requests().at(0).messages.at(0).content;
  for (const auto& s : summaries) {
    if (prompt.find(s.text) == std::string::npos) v.fail("rendered prompt lacks " + s.text);
  }
  if (prompt.find("[modify, add, delete]") == std::string::npos) v.fail("option list missing");
  if (v.pass) v.detail = "5 digests match; group prompt carries 3 summaries and [modify, add, delete]";
  return v;
}

// ---------------------------------------------------------------------------

Verdict answer_extraction() {
  Verdict v;
  auto cases = nlohmann::json::parse(read_file(tfgrpo::testing::test_data() / "answer_extraction.json"));
  int passed = 0;
  for (const auto& c : cases) {
    std::optional<std::string> want;
    if (!c["expected"].is_null()) want = c["expected"].get<std::string>();
    if (extract_final_answer(c["text"].get<std::string>()) == want) {
      ++passed;
    } else {
      v.fail("case '" + c["name"].get<std::string>() + "'");
    }
  }
  if (cases.size() != 30) v.fail("fixture holds " + std::to_string(cases.size()) + " cases, expected 30");
  if (v.pass) v.detail = std::to_string(passed) + "/30 cases exact";
  return v;
}

// ---------------------------------------------------------------------------

Verdict cost_accounting() {
  Verdict v;
  auto manifest = nlohmann::json::parse(
      read_file(tfgrpo::testing::source_dir() / "tests/golden/sample_learn/manifest.json"));
  const auto& p = manifest.at("pricing");
  PricingTable pricing{p.at("input_per_1m").get<double>(), p.at("cached_input_per_1m").get<double>(),
                       p.at("output_per_1m").get<double>()};
  // 38M input (29M served from cache) and 6.6M output tokens.
  TokenUsage usage{38'000'000, 29'000'000, 6'600'000};
  const double cost = estimate_cost(usage, pricing);
  char buf[128];
  std::snprintf(buf, sizeof buf, "$%.3f under %s", cost, p.at("name").get<std::string>().c_str());
  v.detail = buf;
  if (std::abs(cost - 18.0) > 1.0) v.fail(std::string("cost ") + buf + " outside 18 +/- 1");
  return v;
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> checks{
      {"golden_end_to_end_learn", golden_learn},
      {"learning_dynamics_replica", learning_dynamics},
      {"degenerate_group_filter", degenerate_filter},
      {"advantage_math", advantage_math},
      {"operation_calculus", operation_calculus},
      {"metrics_oracle", metrics_oracle},
      {"prompt_fidelity", prompt_fidelity},
      {"answer_extraction", answer_extraction},
      {"cost_accounting", cost_accounting},
  };
  int failures = 0;
  for (const auto& [name, check] : checks) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.fail(std::string("threw: ") + e.what());
    }
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
