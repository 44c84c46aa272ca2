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

#include "tfgrpo/cli.hpp"

#include <cstdlib>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "tfgrpo/error.hpp"
#include "tfgrpo/eval_harness.hpp"
#include "tfgrpo/learner.hpp"
#include "tfgrpo/prompt_kit.hpp"
#include "tfgrpo/reward_judge.hpp"
#include "tfgrpo/text_util.hpp"

namespace tfgrpo {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::config_invalid, message);
}

// Typed, key-checked view over one JSON object of the config.
class Section {
 public:
  Section(const json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) config_error(where_ + " must be an object");
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    std::set<std::string_view> allowed(keys);
    for (const auto& [key, value] : doc_.items()) {
      if (!allowed.contains(key)) config_error(where_ + ": unknown key '" + key + "'");
    }
  }

  bool has(const char* key) const { return doc_.contains(key) && !doc_[key].is_null(); }
  const json& raw(const char* key) const { return doc_[key]; }
  std::string path_of(const char* key) const { return where_ + "." + key; }

  template <typename T>
  void read(const char* key, T& target) const {
    if (!has(key)) return;
    const json& v = doc_[key];
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) config_error(path_of(key) + " must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) config_error(path_of(key) + " must be an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) config_error(path_of(key) + " must be a number");
    } else {
      if (!v.is_string()) config_error(path_of(key) + " must be a string");
    }
    target = v.get<T>();
  }

  template <typename T>
  std::optional<T> optional(const char* key) const {
    if (!has(key)) return std::nullopt;
    T value{};
    read(key, value);
    return value;
  }

 private:
  const json& doc_;
  std::string where_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::filesystem::path existing_path(const std::filesystem::path& base, const std::string& p,
                                    const std::string& what) {
  auto path = resolve(base, p);
  if (!std::filesystem::exists(path)) config_error(what + " does not exist: " + path.string());
  return path;
}

void parse_learn_section(const Section& s, LearnConfig& cfg) {
  s.allow_only({"epochs", "batches_per_epoch", "group_size", "learn_temperature",
                "eval_temperature", "max_ops_per_group", "max_experience_words", "max_turns",
                "concurrency", "seed", "use_ground_truth", "use_group_computation"});
  s.read("epochs", cfg.epochs);
  s.read("batches_per_epoch", cfg.batches_per_epoch);
  s.read("group_size", cfg.group_size);
  s.read("learn_temperature", cfg.learn_temperature);
  s.read("eval_temperature", cfg.eval_temperature);
  s.read("max_ops_per_group", cfg.max_ops_per_group);
  s.read("max_experience_words", cfg.max_experience_words);
  s.read("max_turns", cfg.max_turns);
  s.read("concurrency", cfg.concurrency);
  s.read("seed", cfg.seed);
  s.read("use_ground_truth", cfg.use_ground_truth);
  s.read("use_group_computation", cfg.use_group_computation);
}

void parse_gateway_section(const Section& s, const std::filesystem::path& base, GatewayConfig& cfg) {
  s.allow_only({"backend", "model", "api_base", "mock_script", "max_attempts",
                "initial_backoff_ms", "timeout_seconds"});
  s.read("backend", cfg.backend);
  s.read("model", cfg.model);
  cfg.api_base = s.optional<std::string>("api_base");
  if (auto script = s.optional<std::string>("mock_script")) {
    cfg.mock_script = existing_path(base, *script, "gateway.mock_script");
  }
  s.read("max_attempts", cfg.retry.max_attempts);
  if (auto ms = s.optional<std::int64_t>("initial_backoff_ms")) {
    if (*ms < 0) config_error("gateway.initial_backoff_ms must be non-negative");
    cfg.retry.initial_backoff = std::chrono::milliseconds(*ms);
  }
  s.read("timeout_seconds", cfg.timeout_seconds);
  if (cfg.backend != "mock" && cfg.backend != "http") {
    config_error("gateway.backend must be \"mock\" or \"http\"");
  }
  if (cfg.retry.max_attempts < 1) config_error("gateway.max_attempts must be at least 1");
  if (cfg.timeout_seconds < 1) config_error("gateway.timeout_seconds must be positive");
}

ToolSpec parse_tool(const json& doc, const std::filesystem::path& base, std::size_t index) {
  Section s(doc, "agent.tools[" + std::to_string(index) + "]");
  s.allow_only({"name", "kind", "endpoint", "fixtures", "in_process"});
  ToolSpec spec;
  std::string kind;
  s.read("kind", kind);
  auto parsed = parse_tool_kind(kind);
  if (!parsed) config_error(s.path_of("kind") + ": unknown tool kind '" + kind + "'");
  spec.kind = *parsed;
  spec.name = kind;
  s.read("name", spec.name);
  spec.endpoint = s.optional<std::string>("endpoint");
  if (auto fixtures = s.optional<std::string>("fixtures")) {
    spec.fixtures = existing_path(base, *fixtures, s.path_of("fixtures"));
  }
  spec.in_process = s.optional<std::string>("in_process");
  if (auto bad = spec.violations(); !bad.empty()) config_error(bad.front());
  return spec;
}

void parse_agent_section(const Section& s, const std::filesystem::path& base, RunConfig& cfg) {
  s.allow_only({"mode", "tools", "code_timeout_seconds", "max_output_tokens"});
  std::string mode = "react";
  s.read("mode", mode);
  if (mode != "react" && mode != "direct") config_error("agent.mode must be \"react\" or \"direct\"");
  cfg.tools.clear();
  if (s.has("tools")) {
    const json& tools = s.raw("tools");
    if (!tools.is_array()) config_error("agent.tools must be a list");
    for (std::size_t i = 0; i < tools.size(); ++i) cfg.tools.push_back(parse_tool(tools[i], base, i));
  } else if (mode == "react") {
    ToolSpec scripted;
    scripted.name = "code_interpreter";
    scripted.in_process = "scripted";
    cfg.tools.push_back(scripted);
  }
  std::vector<std::string> kinds;
  for (const auto& t : cfg.tools) kinds.emplace_back(to_string(t.kind));
  cfg.mode = mode == "direct" ? AgentMode::direct() : AgentMode::react(kinds);
  if (auto bad = cfg.mode.violations(); !bad.empty()) config_error("agent: " + bad.front());
  s.read("code_timeout_seconds", cfg.code_timeout_seconds);
  if (cfg.code_timeout_seconds < 1) config_error("agent.code_timeout_seconds must be positive");
  s.read("max_output_tokens", cfg.agent.max_output_tokens);
}

void parse_pricing_section(const Section& s, RunConfig& cfg) {
  s.allow_only({"name", "input_per_1m", "cached_input_per_1m", "output_per_1m"});
  s.read("name", cfg.pricing_name);
  s.read("input_per_1m", cfg.pricing.input_price_per_1m);
  s.read("cached_input_per_1m", cfg.pricing.cached_input_price_per_1m);
  s.read("output_per_1m", cfg.pricing.output_price_per_1m);
  if (!cfg.pricing.valid()) config_error("pricing entries must be non-negative");
}

json usage_json(const TokenUsage& u) {
  return {{"input_tokens", u.input_tokens},
          {"cached_input_tokens", u.cached_input_tokens},
          {"output_tokens", u.output_tokens}};
}

json pricing_json(const RunConfig& cfg) {
  return {{"name", cfg.pricing_name},
          {"input_per_1m", cfg.pricing.input_price_per_1m},
          {"cached_input_per_1m", cfg.pricing.cached_input_price_per_1m},
          {"output_per_1m", cfg.pricing.output_price_per_1m}};
}

json template_digests() {
  json out = json::object();
  for (auto name : all_templates()) {
    out[template_file_name(name)] = sha256_hex(embedded_body(name));
  }
  return out;
}

// Everything a run depends on, minus wall-clock data.
json manifest_json(std::string_view command, const RunConfig& cfg, const Gateway& gateway) {
  json doc;
  doc["command"] = command;
  doc["config"] = cfg.source;
  doc["seed"] = cfg.learn.seed;
  doc["grader_ids"] = cfg.grader == "judge" ? json::array({kJudgeGraderId})
                                             : json::array({kMathGraderId});
  if (!cfg.learn.use_ground_truth) doc["grader_ids"].push_back(kUngradedGraderId);
  if (cfg.grader == "judge") {
    doc["grader_notes"] = json::array(
        {std::string(kJudgeGraderId) + " is a stand-in reward model: a YES/NO model verdict on "
                                       "agreement with the reference answer"});
  }
  doc["template_digests"] = template_digests();
  doc["pricing"] = pricing_json(cfg);
  const UsageReport usage = gateway.usage_report();
  json by_tag = json::object();
  for (const auto& [tag, u] : usage.by_tag) by_tag[tag] = usage_json(u);
  doc["usage"] = {{"total", usage_json(usage.total)}, {"by_tag", std::move(by_tag)}};
  doc["cost_usd"] = estimate_cost(usage.total, cfg.pricing);
  doc["gateway_retries"] = gateway.total_retries();
  return doc;
}

std::string dump(const json& doc) {
  return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

RunConfig config_for(const CommandArgs& args) {
  if (!args.config) config_error("--config is required");
  RunConfig cfg = load_run_config(*args.config);
  if (args.mock_script) {
    if (!std::filesystem::exists(*args.mock_script)) {
      config_error("--mock-script does not exist: " + args.mock_script->string());
    }
    cfg.gateway.backend = "mock";
    cfg.gateway.mock_script = *args.mock_script;
  }
  if (args.out) cfg.output_dir = *args.out;
  if (cfg.gateway.backend == "mock" && !cfg.gateway.mock_script) {
    config_error("the mock backend needs gateway.mock_script or --mock-script");
  }
  return cfg;
}

RewardFn reward_for(const RunConfig& cfg, Gateway& gateway) {
  return cfg.grader == "judge" ? judged_reward(gateway) : math_reward();
}

std::vector<Query> train_set(const RunConfig& cfg) {
  auto data = load_dataset(cfg.train_dataset);
  if (cfg.train_sample) data = sample_subset(data, *cfg.train_sample, cfg.learn.seed);
  return data;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::config_invalid:
    case ErrorCode::checkpoint_invalid:
    case ErrorCode::malformed_line:
    case ErrorCode::duplicate_id:
    case ErrorCode::n_too_large:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& config_dir) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) config_error("config is not valid JSON");
  Section root(doc, "config");
  root.allow_only({"learn", "gateway", "pricing", "agent", "grader", "domain", "train_dataset",
                   "train_sample", "eval_dataset", "eval_k", "output_dir"});
  RunConfig cfg;
  cfg.config_dir = config_dir;
  cfg.source = doc;
  if (root.has("learn")) parse_learn_section(Section(root.raw("learn"), "learn"), cfg.learn);
  if (root.has("gateway")) {
    parse_gateway_section(Section(root.raw("gateway"), "gateway"), config_dir, cfg.gateway);
  }
  if (root.has("pricing")) parse_pricing_section(Section(root.raw("pricing"), "pricing"), cfg);
  if (root.has("agent")) {
    parse_agent_section(Section(root.raw("agent"), "agent"), config_dir, cfg);
  } else {
    parse_agent_section(Section(json::object(), "agent"), config_dir, cfg);
  }
  root.read("grader", cfg.grader);
  if (cfg.grader != "math" && cfg.grader != "judge") {
    config_error("grader must be \"math\" or \"judge\"");
  }
  std::string domain = "math";
  root.read("domain", domain);
  auto tag = parse_domain_tag(domain);
  if (!tag) config_error("unknown domain '" + domain + "'");
  cfg.domain = *tag;

  std::string train;
  root.read("train_dataset", train);
  if (train.empty()) config_error("train_dataset is required");
  cfg.train_dataset = existing_path(config_dir, train, "train_dataset");
  if (auto n = root.optional<std::int64_t>("train_sample")) {
    if (*n < 1) config_error("train_sample must be positive");
    cfg.train_sample = static_cast<std::size_t>(*n);
  }
  if (auto eval = root.optional<std::string>("eval_dataset")) {
    cfg.eval_dataset = existing_path(config_dir, *eval, "eval_dataset");
  }
  root.read("eval_k", cfg.eval_k);
  if (cfg.eval_k < 1) config_error("eval_k must be at least 1");
  if (auto out = root.optional<std::string>("output_dir")) {
    cfg.output_dir = resolve(config_dir, *out);
  } else {
    cfg.output_dir = resolve(config_dir, "out");
  }

  if (auto bad = cfg.learn.violations(); !bad.empty()) config_error("learn: " + bad.front());
  cfg.agent.max_turns = cfg.learn.max_turns;
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) config_error("config file does not exist: " + path.string());
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    config_error(e.what());
  }
  return parse_run_config(text, std::filesystem::absolute(path).parent_path());
}

std::shared_ptr<ChatBackend> make_backend(const GatewayConfig& cfg) {
  if (cfg.backend == "mock") {
    if (!cfg.mock_script) config_error("the mock backend needs a script");
    return MockBackend::from_file(*cfg.mock_script);
  }
  HttpBackendOptions opts;
  opts.model = cfg.model;
  opts.base_url = cfg.api_base.value_or("");
  // Secrets and the endpoint come from the environment when set.
  if (const char* base = std::getenv("TFGRPO_API_BASE")) opts.base_url = base;
  if (const char* key = std::getenv("TFGRPO_API_KEY")) opts.api_key = key;
  if (opts.base_url.empty()) config_error("http backend needs gateway.api_base or TFGRPO_API_BASE");
  opts.timeout = std::chrono::seconds(cfg.timeout_seconds);
  return std::make_shared<HttpChatBackend>(opts);
}

ToolBelt make_toolbelt(const RunConfig& cfg) {
  ToolBelt belt;
  belt.code_timeout = std::chrono::seconds(cfg.code_timeout_seconds);
  WebToolsOptions web;
  bool any_web = false;
  for (const auto& spec : cfg.tools) {
    switch (spec.kind) {
      case ToolKind::code_interpreter:
        if (spec.endpoint) {
          belt.code = std::make_shared<SandboxClient>(*spec.endpoint);
        } else if (spec.in_process == "python") {
          belt.code = std::make_shared<LocalPythonInterpreter>();
        } else {
          belt.code = std::make_shared<ScriptedInterpreter>();
        }
        break;
      case ToolKind::web_search:
        any_web = true;
        if (spec.fixtures) web.corpus = FixtureCorpus::load(*spec.fixtures);
        if (spec.endpoint) web.search_endpoint = *spec.endpoint;
        break;
      case ToolKind::page_fetch:
        any_web = true;
        if (spec.fixtures && !web.corpus) web.corpus = FixtureCorpus::load(*spec.fixtures);
        if (spec.endpoint) web.live_fetch = true;
        break;
    }
  }
  if (any_web) belt.web = std::make_shared<WebTools>(std::move(web));
  return belt;
}

LibraryDiff diff_libraries(const ExperienceLibrary& before, const ExperienceLibrary& after) {
  LibraryDiff diff;
  for (const auto& e : after.entries) {
    const Experience* old = before.find(e.id);
    if (!old) {
      diff.added.push_back(e.id);
    } else if (old->text != e.text) {
      diff.modified.push_back(e.id);
    }
  }
  for (const auto& e : before.entries) {
    if (!after.find(e.id)) diff.removed.push_back(e.id);
  }
  return diff;
}

int cmd_learn(const CommandArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = config_for(args);
    auto dataset = train_set(cfg);
    ExperienceLibrary initial;
    if (args.library) initial = load_library(*args.library);
    std::filesystem::create_directories(cfg.output_dir);

    Gateway gateway(make_backend(cfg.gateway), cfg.gateway.retry);
    AgentRunner agent(gateway, make_toolbelt(cfg), cfg.agent);
    LearnerOptions options;
    options.checkpoint_dir = cfg.output_dir;
    Learner learner(gateway, agent, reward_for(cfg, gateway), cfg.mode, cfg.learn, options);
    LearnResult result;
    try {
      result = learner.learn(dataset, initial);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::config_invalid) throw;
      throw Error(ErrorCode::run_failed, e.what());
    }

    write_file_atomic(cfg.output_dir / "metrics.csv", step_records_csv(result.records));
    json manifest = manifest_json("learn", cfg, gateway);
    json checkpoints = json::array();
    for (const auto& r : result.records) checkpoints.push_back(checkpoint_file_name(r.step));
    manifest["checkpoints"] = std::move(checkpoints);
    manifest["events"] = result.events;
    write_file_atomic(cfg.output_dir / "manifest.json", dump(manifest));

    for (const auto& r : result.records) {
      out << "step " << r.step << ": mean_train_reward=" << std::fixed << std::setprecision(4)
          << r.mean_train_reward << " groups_extracted=" << r.groups_extracted << "/"
          << r.groups_total << " ops_applied=" << r.ops_applied
          << " library_size=" << r.library_size_after << "\n";
    }
    out << "cost_usd=" << std::fixed << std::setprecision(6)
        << estimate_cost(gateway.total_usage(), cfg.pricing) << "\n";
    return kExitOk;
  });
}

int cmd_eval(const CommandArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = config_for(args);
    ExperienceLibrary lib;
    if (args.library) lib = load_library(*args.library);
    const int k = args.k.value_or(cfg.eval_k);
    if (k < 1) config_error("--k must be at least 1");
    const auto dataset_path = cfg.eval_dataset.value_or(cfg.train_dataset);
    auto dataset = load_dataset(dataset_path);
    std::filesystem::create_directories(cfg.output_dir);

    Gateway gateway(make_backend(cfg.gateway), cfg.gateway.retry);
    AgentRunner agent(gateway, make_toolbelt(cfg), cfg.agent);
    Evaluator evaluator(gateway, agent, reward_for(cfg, gateway), cfg.learn.concurrency);
    const std::string dataset_id = dataset_path.stem().string();
    EvalReport report;
    try {
      report = evaluator.evaluate(dataset, lib, cfg.mode, k, cfg.learn.eval_temperature, dataset_id);
    } catch (const Error& e) {
      throw Error(ErrorCode::run_failed, e.what());
    }

    json doc = json::parse(report_to_json(report));
    doc["pricing"] = pricing_json(cfg);
    doc["cost_usd"] = estimate_cost(report.usage, cfg.pricing);
    write_file_atomic(cfg.output_dir / ("eval_" + dataset_id + "_" + std::to_string(k) + ".json"),
                      dump(doc));
    out << dataset_id << " k=" << k << " mean_at_k=" << std::fixed << std::setprecision(4)
        << report.mean_at_k << " pass_at_k=" << report.pass_at_k << "\n";
    return kExitOk;
  });
}

int cmd_inspect(const CommandArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!args.library) config_error("--library is required");
    ExperienceLibrary lib = load_library(*args.library);
    out << "step: " << lib.step << "\n";
    out << "size: " << lib.size() << "\n";
    for (std::size_t i = 0; i < lib.size(); ++i) {
      out << "[" << i + 1 << "]. " << lib.entries[i].text << "  (" << lib.entries[i].id << ")\n";
    }
    if (args.diff) {
      ExperienceLibrary other = load_library(*args.diff);
      LibraryDiff diff = diff_libraries(lib, other);
      out << "diff against " << args.diff->filename().string() << ":";
      out << (diff.empty() ? " none\n" : "\n");
      for (const auto& id : diff.added) out << "+ " << id << ": " << other.find(id)->text << "\n";
      for (const auto& id : diff.removed) out << "- " << id << ": " << lib.find(id)->text << "\n";
      for (const auto& id : diff.modified) out << "~ " << id << ": " << other.find(id)->text << "\n";
    }
    return kExitOk;
  });
}

int cmd_baseline(const CommandArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = config_for(args);
    const int n = args.n.value_or(0);
    if (n < 0) config_error("--n must be non-negative");
    std::filesystem::create_directories(cfg.output_dir);
    Gateway gateway(make_backend(cfg.gateway), cfg.gateway.retry);
    ExperienceLibrary lib;
    try {
      lib = generate_direct_experiences(gateway, n, cfg.domain, cfg.learn);
    } catch (const Error& e) {
      throw Error(ErrorCode::run_failed, e.what());
    }
    save_library(lib, cfg.output_dir / "library_baseline.json");
    json manifest = manifest_json("baseline", cfg, gateway);
    manifest["requested"] = n;
    manifest["generated"] = lib.size();
    write_file_atomic(cfg.output_dir / "manifest_baseline.json", dump(manifest));
    out << "baseline library: " << lib.size() << " of " << n << " experiences\n";
    return kExitOk;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Training-free group relative policy optimization"};
  app.require_subcommand(1);
  CommandArgs args;
  std::string config, library, diff, output, script;
  int k = 0;
  int n = 0;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "run configuration JSON")->required();
    cmd->add_option("--out", output, "output directory (overrides config)");
    cmd->add_option("--mock-script", script, "scripted model replies (forces the mock backend)");
  };
  auto* learn = app.add_subcommand("learn", "run the learning loop");
  add_config(learn);
  learn->add_option("--library", library, "initial library checkpoint");
  auto* eval = app.add_subcommand("eval", "evaluate a library");
  add_config(eval);
  eval->add_option("--library", library, "library checkpoint (empty when omitted)");
  eval->add_option("--k", k, "runs per query");
  auto* inspect = app.add_subcommand("inspect", "print a library checkpoint");
  inspect->add_option("--library", library, "library checkpoint")->required();
  inspect->add_option("--diff", diff, "second checkpoint to compare against");
  auto* baseline = app.add_subcommand("baseline", "generate experiences without learning");
  add_config(baseline);
  baseline->add_option("--n", n, "number of experiences")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out, help_err;
    int code = app.exit(e, help_out, help_err);
    out << help_out.str();
    err << help_err.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (!config.empty()) args.config = config;
  if (!library.empty()) args.library = library;
  if (!diff.empty()) args.diff = diff;
  if (!output.empty()) args.out = output;
  if (!script.empty()) args.mock_script = script;
  if (eval->count("--k") > 0) args.k = k;
  if (baseline->count("--n") > 0) args.n = n;

  if (learn->parsed()) return cmd_learn(args, out, err);
  if (eval->parsed()) return cmd_eval(args, out, err);
  if (inspect->parsed()) return cmd_inspect(args, out, err);
  return cmd_baseline(args, out, err);
}

}  // namespace tfgrpo
