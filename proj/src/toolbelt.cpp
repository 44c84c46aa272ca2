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

#include "tfgrpo/toolbelt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tfgrpo/text_util.hpp"

namespace tfgrpo {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string_view to_string(ToolKind kind) {
  switch (kind) {
    case ToolKind::code_interpreter: return "code_interpreter";
    case ToolKind::web_search: return "web_search";
    case ToolKind::page_fetch: return "page_fetch";
  }
  return "code_interpreter";
}

std::optional<ToolKind> parse_tool_kind(std::string_view text) {
  if (text == "code_interpreter") return ToolKind::code_interpreter;
  if (text == "web_search") return ToolKind::web_search;
  if (text == "page_fetch") return ToolKind::page_fetch;
  return std::nullopt;
}

std::vector<std::string> ToolSpec::violations() const {
  std::vector<std::string> out;
  if (name.empty()) out.push_back("tool name is empty");
  if (kind == ToolKind::code_interpreter) {
    if (fixtures) out.push_back(name + ": code_interpreter takes no fixtures");
    if (endpoint.has_value() == in_process.has_value()) {
      out.push_back(name + ": code_interpreter needs exactly one of endpoint or in_process");
    }
    if (in_process && *in_process != "python" && *in_process != "scripted") {
      out.push_back(name + ": in_process must be \"python\" or \"scripted\"");
    }
  } else {
    if (endpoint.has_value() == fixtures.has_value()) {
      out.push_back(name + ": web tools need exactly one of endpoint or fixtures");
    }
    if (in_process) out.push_back(name + ": in_process applies to code_interpreter only");
  }
  return out;
}

std::string_view to_string(ExecStatus status) {
  switch (status) {
    case ExecStatus::ok: return "ok";
    case ExecStatus::error: return "error";
    case ExecStatus::timeout: return "timeout";
  }
  return "error";
}

std::optional<ExecStatus> parse_exec_status(std::string_view text) {
  if (text == "ok") return ExecStatus::ok;
  if (text == "error") return ExecStatus::error;
  if (text == "timeout") return ExecStatus::timeout;
  return std::nullopt;
}

std::string format_observation(const Observation& obs) {
  json doc;
  doc["status"] = std::string(to_string(obs.status));
  doc["message"] = truncate_with_marker(obs.message, kObservationCharLimit);
  return doc.dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace {

struct UrlParts {
  std::string scheme_host_port;
  std::string path;
};

UrlParts split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::invalid_argument, "URL needs a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

// ---------------------------------------------------------------------------
// SandboxClient

SandboxClient::SandboxClient(std::string endpoint) : endpoint_(std::move(endpoint)) {
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
}

Observation SandboxClient::execute(const std::string& code, std::chrono::milliseconds timeout) {
  UrlParts url = split_url(endpoint_);
  std::string prefix = url.path == "/" ? "" : url.path;
  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(std::chrono::seconds(5));
  client.set_read_timeout(timeout + kGrace);
  json body = {{"code", code}, {"timeout_seconds", static_cast<double>(timeout.count()) / 1000.0}};
  auto start = Clock::now();
  auto result = client.Post(prefix + "/execute",
                            body.dump(-1, ' ', false, json::error_handler_t::replace),
                            "application/json");
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
  if (!result) {
    if (result.error() == httplib::Error::Read && elapsed >= timeout) {
      return {ExecStatus::timeout, "execution exceeded " + std::to_string(timeout.count()) + " ms",
              elapsed};
    }
    throw Error(ErrorCode::sandbox_unreachable,
                endpoint_ + ": " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw Error(ErrorCode::sandbox_unreachable,
                endpoint_ + ": HTTP " + std::to_string(result->status) + " " + result->body);
  }
  json reply;
  try {
    reply = json::parse(result->body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::sandbox_unreachable, std::string("malformed sandbox reply: ") + e.what());
  }
  auto status = parse_exec_status(reply.value("status", std::string()));
  if (!status || !reply.contains("message") || !reply["message"].is_string()) {
    throw Error(ErrorCode::sandbox_unreachable, "malformed sandbox reply: " + result->body);
  }
  return {*status, reply["message"].get<std::string>(), elapsed};
}

// ---------------------------------------------------------------------------
// LocalPythonInterpreter

LocalPythonInterpreter::LocalPythonInterpreter(std::string python, std::size_t output_cap)
    : python_(std::move(python)), output_cap_(output_cap) {}

Observation LocalPythonInterpreter::execute(const std::string& code,
                                            std::chrono::milliseconds timeout) {
  std::string dir_template =
      (std::filesystem::temp_directory_path() / "tfgrpo-exec-XXXXXX").string();
  if (::mkdtemp(dir_template.data()) == nullptr) {
    throw Error(ErrorCode::sandbox_unreachable, "cannot create a scratch directory");
  }
  const std::string workdir = dir_template;

  int pipe_fds[2];
  if (::pipe2(pipe_fds, O_CLOEXEC) != 0) {
    std::filesystem::remove_all(workdir);
    throw Error(ErrorCode::sandbox_unreachable, "pipe failed");
  }
  std::vector<char*> argv = {python_.data(), const_cast<char*>("-c"),
                             const_cast<char*>(code.c_str()), nullptr};
  auto start = Clock::now();
  pid_t pid = ::fork();
  if (pid < 0) {
    ::close(pipe_fds[0]);
    ::close(pipe_fds[1]);
    std::filesystem::remove_all(workdir);
    throw Error(ErrorCode::sandbox_unreachable, "fork failed");
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    if (::chdir(workdir.c_str()) != 0) ::_exit(126);
    int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    ::dup2(pipe_fds[1], STDOUT_FILENO);
    ::dup2(pipe_fds[1], STDERR_FILENO);
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(pipe_fds[1]);

  std::string output;
  bool timed_out = false;
  const auto deadline = start + timeout;
  char buf[4096];
  for (;;) {
    auto now = Clock::now();
    if (now >= deadline) {
      timed_out = true;
      break;
    }
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
    pollfd pfd{pipe_fds[0], POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(std::max<std::int64_t>(1, remaining.count())));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (rc == 0) continue;
    ssize_t n = ::read(pipe_fds[0], buf, sizeof(buf));
    if (n <= 0) break;
    if (output.size() < output_cap_) {
      output.append(buf, static_cast<std::size_t>(n));
    }
  }
  if (timed_out) ::kill(-pid, SIGKILL);
  ::close(pipe_fds[0]);
  int wstatus = 0;
  while (::waitpid(pid, &wstatus, 0) < 0 && errno == EINTR) {
  }
  // Reap stragglers left in the group by the snippet.
  ::kill(-pid, SIGKILL);
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
  std::error_code ec;
  std::filesystem::remove_all(workdir, ec);

  if (output.size() > output_cap_) output.resize(output_cap_);
  if (timed_out) {
    output += "\nTimeoutError: execution exceeded " + std::to_string(timeout.count()) + " ms";
    return {ExecStatus::timeout, output, elapsed};
  }
  if (WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 127 && output.empty()) {
    throw Error(ErrorCode::sandbox_unreachable, "cannot execute " + python_);
  }
  bool ok = WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 0;
  return {ok ? ExecStatus::ok : ExecStatus::error, output, elapsed};
}

// ---------------------------------------------------------------------------
// ScriptedInterpreter

ScriptedInterpreter::ScriptedInterpreter(Observation fallback) : fallback_(std::move(fallback)) {}

void ScriptedInterpreter::on_code(std::string code, Observation reply) {
  std::lock_guard lock(mu_);
  by_code_[std::move(code)] = std::move(reply);
}

void ScriptedInterpreter::enqueue(Observation reply) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(reply));
}

Observation ScriptedInterpreter::execute(const std::string& code, std::chrono::milliseconds) {
  std::lock_guard lock(mu_);
  executed_.push_back(code);
  if (auto it = by_code_.find(code); it != by_code_.end()) return it->second;
  if (!queue_.empty()) {
    Observation next = std::move(queue_.front());
    queue_.pop_front();
    return next;
  }
  return fallback_;
}

std::vector<std::string> ScriptedInterpreter::executed() const {
  std::lock_guard lock(mu_);
  return executed_;
}

// ---------------------------------------------------------------------------
// Web tools

FixtureCorpus::FixtureCorpus(std::vector<FixtureDoc> docs) : docs_(std::move(docs)) {}

FixtureCorpus FixtureCorpus::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::config_invalid, "fixture directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<FixtureDoc> docs;
  for (const auto& file : files) {
    json doc;
    try {
      doc = json::parse(read_file(file));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::config_invalid, file.string() + ": " + e.what());
    }
    for (const char* key : {"url", "title", "text"}) {
      if (!doc.contains(key) || !doc[key].is_string()) {
        throw Error(ErrorCode::config_invalid, file.string() + ": missing string '" + key + "'");
      }
    }
    docs.push_back({doc["url"].get<std::string>(), doc["title"].get<std::string>(),
                    doc["text"].get<std::string>()});
  }
  return FixtureCorpus(std::move(docs));
}

const FixtureDoc* FixtureCorpus::find_url(std::string_view url) const {
  for (const auto& d : docs_) {
    if (d.url == url) return &d;
  }
  return nullptr;
}

std::vector<std::string> search_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u) != 0) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

WebTools::WebTools(WebToolsOptions options) : options_(std::move(options)) {}

std::vector<SearchHit> WebTools::web_search(const std::string& query, int num_results) const {
  if (num_results <= 0) return {};
  if (options_.corpus) {
    auto q = search_tokens(query);
    std::set<std::string> wanted(q.begin(), q.end());
    struct Scored {
      std::size_t score;
      std::size_t order;
    };
    std::vector<Scored> scored;
    const auto& docs = options_.corpus->docs();
    for (std::size_t i = 0; i < docs.size(); ++i) {
      auto tokens = search_tokens(docs[i].title + " " + docs[i].text);
      std::set<std::string> have(tokens.begin(), tokens.end());
      std::size_t score = 0;
      for (const auto& w : wanted) score += have.count(w);
      if (score > 0) scored.push_back({score, i});
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) { return a.score > b.score; });
    std::vector<SearchHit> hits;
    for (const auto& s : scored) {
      if (hits.size() >= static_cast<std::size_t>(num_results)) break;
      const auto& d = docs[s.order];
      hits.push_back({d.title, d.url, truncate_with_marker(d.text, 200)});
    }
    return hits;
  }
  if (!options_.search_endpoint) throw Error(ErrorCode::no_backend, "no search backend configured");
  UrlParts url = split_url(*options_.search_endpoint);
  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(std::chrono::seconds(30));
  httplib::Params params{{"q", query}, {"num", std::to_string(num_results)}};
  auto result = client.Get(url.path, params, httplib::Headers{});
  if (!result || result->status != 200) {
    throw Error(ErrorCode::fetch_failed, "search endpoint unavailable");
  }
  std::vector<SearchHit> hits;
  try {
    for (const auto& item : json::parse(result->body)) {
      if (hits.size() >= static_cast<std::size_t>(num_results)) break;
      hits.push_back({item.value("title", ""), item.value("url", ""), item.value("snippet", "")});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::fetch_failed, std::string("malformed search reply: ") + e.what());
  }
  return hits;
}

PageContent WebTools::get_content(const std::string& url) const {
  if (options_.corpus) {
    if (const auto* doc = options_.corpus->find_url(url)) return {true, doc->text};
    if (!options_.live_fetch) throw Error(ErrorCode::fetch_failed, "not_found: " + url);
  }
  if (!options_.live_fetch) throw Error(ErrorCode::no_backend, "live fetch disabled for " + url);
  UrlParts parts = split_url(url);
  httplib::Client client(parts.scheme_host_port);
  client.set_follow_location(true);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(std::chrono::seconds(30));
  auto result = client.Get(parts.path);
  if (!result) {
    throw Error(ErrorCode::fetch_failed, "connection failed: " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw Error(ErrorCode::fetch_failed, "http_" + std::to_string(result->status) + ": " + url);
  }
  return {true, strip_markup(result->body)};
}

std::string strip_markup(std::string_view html) {
  std::string text;
  std::string lower = to_lower_ascii(html);
  std::size_t i = 0;
  while (i < html.size()) {
    if (html[i] == '<') {
      for (const char* skip : {"script", "style"}) {
        std::string open = std::string("<") + skip;
        if (lower.compare(i, open.size(), open) == 0) {
          auto close = lower.find(std::string("</") + skip, i);
          i = close == std::string::npos ? html.size() : close;
          break;
        }
      }
      auto end = html.find('>', i);
      if (end == std::string_view::npos) break;
      i = end + 1;
      text.push_back(' ');
      continue;
    }
    if (html[i] == '&') {
      static const std::pair<std::string_view, char> kEntities[] = {
          {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&#39;", '\''},
          {"&nbsp;", ' '}};
      bool matched = false;
      for (const auto& [entity, ch] : kEntities) {
        if (html.substr(i, entity.size()) == entity) {
          text.push_back(ch);
          i += entity.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    text.push_back(html[i]);
    ++i;
  }
  std::string out;
  for (const auto& word : split_whitespace(text)) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

}  // namespace tfgrpo
