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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tfgrpo/agent_runtime.hpp"
#include "tfgrpo/core_model.hpp"
#include "tfgrpo/llm_gateway.hpp"
#include "tfgrpo/toolbelt.hpp"

namespace tfgrpo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

struct GatewayConfig {
  std::string backend = "mock";  // "mock" | "http"
  std::string model = "mock";
  std::optional<std::string> api_base;
  std::optional<std::filesystem::path> mock_script;
  RetryPolicy retry;
  int timeout_seconds = 600;
};

/// File-backed run configuration. Relative paths resolve against the
/// directory holding the config file.
struct RunConfig {
  std::filesystem::path config_dir;
  nlohmann::ordered_json source;  // echoed into the manifest
  LearnConfig learn;
  GatewayConfig gateway;
  std::string pricing_name = "unpriced";
  PricingTable pricing;
  AgentMode mode = AgentMode::react();
  std::vector<ToolSpec> tools;
  int code_timeout_seconds = 10;
  AgentOptions agent;
  std::string grader = "math";  // "math" | "judge"
  DomainTag domain = DomainTag::math;
  std::filesystem::path train_dataset;
  std::optional<std::size_t> train_sample;
  std::optional<std::filesystem::path> eval_dataset;
  int eval_k = 32;
  std::filesystem::path output_dir = "out";
};

/// Throws Error(config_invalid) on unknown keys, wrong types, invalid values
/// and referenced paths that do not exist.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& config_dir);
RunConfig load_run_config(const std::filesystem::path& path);

std::shared_ptr<ChatBackend> make_backend(const GatewayConfig& cfg);
ToolBelt make_toolbelt(const RunConfig& cfg);

struct LibraryDiff {
  std::vector<std::string> added;
  std::vector<std::string> removed;
  std::vector<std::string> modified;

  bool empty() const { return added.empty() && removed.empty() && modified.empty(); }
};

/// Id-level comparison in `after` order (removed ids in `before` order).
LibraryDiff diff_libraries(const ExperienceLibrary& before, const ExperienceLibrary& after);

struct CommandArgs {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> library;
  std::optional<std::filesystem::path> diff;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> mock_script;
  std::optional<int> k;
  std::optional<int> n;
};

int cmd_learn(const CommandArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const CommandArgs& args, std::ostream& out, std::ostream& err);
int cmd_inspect(const CommandArgs& args, std::ostream& out, std::ostream& err);
int cmd_baseline(const CommandArgs& args, std::ostream& out, std::ostream& err);

/// Full command line: `tfgrpo <learn|eval|inspect|baseline> [flags]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tfgrpo
