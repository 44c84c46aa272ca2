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

#include <doctest.h>

#include <nlohmann/json.hpp>

#include "test_support.hpp"
#include "tfgrpo/agent_runtime.hpp"
#include "tfgrpo/prompt_kit.hpp"
#include "tfgrpo/text_util.hpp"

using namespace tfgrpo;

namespace {

struct Harness {
  std::shared_ptr<MockBackend> mock;
  Gateway gateway;
  std::shared_ptr<ScriptedInterpreter> interpreter = std::make_shared<ScriptedInterpreter>();

  explicit Harness(std::vector<std::string> replies)
      : mock(std::make_shared<MockBackend>(to_script(replies))), gateway(mock) {}

  static std::vector<ScriptEntry> to_script(const std::vector<std::string>& replies) {
    std::vector<ScriptEntry> out;
    for (const auto& r : replies) out.push_back({"rollout", r});
    return out;
  }

  AgentRunner runner(int max_turns = 16) {
    ToolBelt belt;
    belt.code = interpreter;
    return AgentRunner(gateway, belt, AgentOptions{max_turns, 512});
  }
};

Query query(std::string text = "What is 3 + 4?") { return Query{"q1", std::move(text), "7", DomainTag::math}; }

}  // namespace

TEST_CASE("code turn then answer turn") {
  Harness h({"Compute.\n```python\nprint(3 + 4)\n```", "<answer>\\boxed{7}</answer>"});
  h.interpreter->enqueue({ExecStatus::ok, "7\n", {}});
  Trajectory t = h.runner().run_rollout(query(), {}, AgentMode::react(), 0.7);
  CHECK(t.terminated_reason == TerminationReason::answered);
  CHECK(t.final_answer == "7");
  REQUIRE(t.tool_calls.size() == 1);
  CHECK(t.tool_calls[0].tool_name == "code_interpreter");
  CHECK(t.tool_calls[0].payload == "print(3 + 4)");
  CHECK(t.tool_calls[0].turn_index == 0);
  REQUIRE(t.messages.size() == 5);
  CHECK(t.messages[3].role == Role::tool);
  auto obs = nlohmann::json::parse(t.messages[3].content);
  CHECK(obs["status"] == "ok");
  CHECK(obs["message"] == "7\n");
  CHECK(h.interpreter->executed() == std::vector<std::string>{"print(3 + 4)"});
}

TEST_CASE("a model that never answers hits the turn limit") {
  std::vector<std::string> replies(4, "Still thinking.");
  Harness h(replies);
  Trajectory t = h.runner(4).run_rollout(query(), {}, AgentMode::react(), 0.7);
  CHECK(t.terminated_reason == TerminationReason::turn_limit);
  CHECK_FALSE(t.final_answer);
  CHECK(t.assistant_turns() == 4);
  // Each silent turn is followed by the nudge.
  CHECK(t.messages.back().role == Role::user);
  CHECK(t.messages.back().content == embedded_body(TemplateName::nudge));
}

TEST_CASE("direct mode answers in one turn without tools") {
  Harness h({"<answer>\\boxed{7}</answer>"});
  Trajectory t = h.runner().run_rollout(query(), {}, AgentMode::direct(), 0.7);
  CHECK(t.tool_calls.empty());
  CHECK(t.final_answer == "7");
  CHECK(t.messages[0].content == embedded_body(TemplateName::direct_system));
}

TEST_CASE("direct mode ignores code blocks") {
  Harness h({"```python\nprint(1)\n```", "<answer>\\boxed{1}</answer>"});
  Trajectory t = h.runner().run_rollout(query(), {}, AgentMode::direct(), 0.7);
  CHECK(t.tool_calls.empty());
  CHECK(h.interpreter->executed().empty());
}

TEST_CASE("several blocks in one turn share one tool call") {
  Harness h({"```python\na = 1\n```\nand\n```py\nprint(a)\n```", "<answer>\\boxed{1}</answer>"});
  h.interpreter->enqueue({ExecStatus::ok, "", {}});
  h.interpreter->enqueue({ExecStatus::error, "NameError: name 'a' is not defined", {}});
  Trajectory t = h.runner().run_rollout(query(), {}, AgentMode::react(), 0.7);
  REQUIRE(t.tool_calls.size() == 1);
  auto lines = split_lines(t.tool_calls[0].observation);
  REQUIRE(lines.size() == 2);
  CHECK(nlohmann::json::parse(lines[1])["status"] == "error");
}

TEST_CASE("answer tag without a boxed value is a parse failure") {
  Harness h({"<answer>seven</answer>"});
  Trajectory t = h.runner().run_rollout(query(), {}, AgentMode::react(), 0.7);
  CHECK(t.terminated_reason == TerminationReason::parse_failure);
  CHECK_FALSE(t.final_answer);
}

TEST_CASE("gateway failure keeps the partial trajectory") {
  Harness h({"```python\nprint(1)\n```"});
  Trajectory t = h.runner().run_rollout(query(), {}, AgentMode::react(), 0.7);
  CHECK(t.terminated_reason == TerminationReason::gateway_error);
  CHECK(t.tool_calls.size() == 1);
  CHECK(t.assistant_turns() == 1);
  CHECK_FALSE(t.notes.empty());
}

TEST_CASE("rollout requests carry temperature and the rollout tag") {
  Harness h({"<answer>\\boxed{7}</answer>"});
  h.runner().run_rollout(query(), {}, AgentMode::react(), 0.3);
  auto reqs = h.mock->requests();
  REQUIRE(reqs.size() == 1);
  CHECK(reqs[0].temperature == 0.3);
  CHECK(reqs[0].request_tag == "rollout");
}

TEST_CASE("first user message embeds the serialized snapshot") {
  ExperienceLibrary lib;
  lib.entries = {{"G1", "Check small cases first.", 1, 1}, {"G2", "Verify with code.", 1, 1}};
  lib.next_id = 3;
  auto messages = AgentRunner::initial_messages(query("P?"), lib, AgentMode::react());
  REQUIRE(messages.size() == 2);
  CHECK(messages[0].content == embedded_body(TemplateName::react_system));
  CHECK(messages[1].content.find(serialize_library(lib)) != std::string::npos);
  CHECK(messages[1].content.find("P?") != std::string::npos);
  auto empty = AgentRunner::initial_messages(query("P?"), {}, AgentMode::react());
  CHECK(empty[1].content.find(kEmptyLibrarySentinel) != std::string::npos);
}

TEST_CASE("web-only react mode uses the web system prompt") {
  auto messages = AgentRunner::initial_messages(query(), {}, AgentMode::react({"web_search", "page_fetch"}));
  CHECK(messages[0].content == embedded_body(TemplateName::react_web_system));
}

TEST_CASE("web calls inside code blocks reach the fixture corpus") {
  FixtureCorpus corpus({{"https://a.test/1", "Beta launch", "The private beta opens in March."},
                        {"https://a.test/2", "Unrelated", "Nothing here."}});
  auto web = std::make_shared<WebTools>(WebToolsOptions{corpus, std::nullopt, false});
  auto mock = std::make_shared<MockBackend>(std::vector<ScriptEntry>{
      {std::nullopt, "```python\ngoogle_search(\"private beta\", num_results=3)\n```"},
      {std::nullopt, "```python\nget_content(\"https://a.test/1\")\n```"},
      {std::nullopt, "<answer>\\boxed{March}</answer>"}});
  Gateway gw(mock);
  ToolBelt belt;
  belt.web = web;
  AgentRunner runner(gw, belt);
  Trajectory t = runner.run_rollout(query("When?"), {}, AgentMode::react({"web_search", "page_fetch"}), 0.7);
  REQUIRE(t.tool_calls.size() == 2);
  CHECK(t.tool_calls[0].tool_name == "web_search");
  CHECK(t.tool_calls[0].observation.find("https://a.test/1") != std::string::npos);
  CHECK(t.tool_calls[0].observation.find("https://a.test/2") == std::string::npos);
  CHECK(t.tool_calls[1].tool_name == "page_fetch");
  CHECK(t.tool_calls[1].observation.find("opens in March") != std::string::npos);
  CHECK(t.final_answer == "March");
}

TEST_CASE("extract_code_blocks") {
  CHECK(extract_code_blocks("```python\nprint(1+1)\n```") == std::vector<std::string>{"print(1+1)"});
  CHECK(extract_code_blocks("plain text").empty());
  CHECK(extract_code_blocks("```python\na\n```\n```python\nb\n```") == std::vector<std::string>{"a", "b"});
  CHECK(extract_code_blocks("```json\n{}\n```").empty());
  CHECK(extract_code_blocks("```Python3\nx\n```") == std::vector<std::string>{"x"});
  auto scan = scan_code_blocks("```python\nprint(1)\n```\n```python\nnever closed");
  CHECK(scan.blocks == std::vector<std::string>{"print(1)"});
  CHECK(scan.unclosed_fence);
}

TEST_CASE("unclosed fence is flagged in the trajectory") {
  Harness h({"```python\nprint(1)", "<answer>\\boxed{1}</answer>"});
  Trajectory t = h.runner().run_rollout(query(), {}, AgentMode::react(), 0.7);
  CHECK(t.tool_calls.empty());
  REQUIRE_FALSE(t.notes.empty());
  CHECK(t.notes[0].find("unclosed") != std::string::npos);
}

TEST_CASE("answer extraction fixture") {
  auto cases = nlohmann::json::parse(read_file(testing::test_data() / "answer_extraction.json"));
  REQUIRE(cases.size() == 30);
  for (const auto& c : cases) {
    CAPTURE(c["name"].get<std::string>());
    auto got = extract_final_answer(c["text"].get<std::string>());
    if (c["expected"].is_null()) {
      CHECK_FALSE(got.has_value());
    } else {
      REQUIRE(got.has_value());
      CHECK(*got == c["expected"].get<std::string>());
    }
  }
}

TEST_CASE("parse_web_calls") {
  auto calls = parse_web_calls("google_search(\"a b\", num_results=5)\nget_content('https://x.test/p')\n");
  REQUIRE(calls);
  REQUIRE(calls->size() == 2);
  CHECK((*calls)[0].kind == WebCall::Kind::search);
  CHECK((*calls)[0].argument == "a b");
  CHECK((*calls)[0].num_results == 5);
  CHECK((*calls)[1].kind == WebCall::Kind::fetch);
  CHECK((*calls)[1].argument == "https://x.test/p");
  CHECK_FALSE(parse_web_calls("print(1)"));
  CHECK_FALSE(parse_web_calls("web_search(\"a\")\nx = 1"));
}

TEST_CASE("agent mode validity") {
  CHECK(AgentMode::direct().violations().empty());
  CHECK(AgentMode::react().violations().empty());
  CHECK_FALSE(AgentMode{AgentKind::direct, {"code_interpreter"}}.violations().empty());
  CHECK_FALSE(AgentMode::react({"shell"}).violations().empty());
}
