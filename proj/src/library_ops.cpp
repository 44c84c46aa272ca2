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

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "tfgrpo/error.hpp"
#include "tfgrpo/learner.hpp"
#include "tfgrpo/text_util.hpp"

namespace tfgrpo {

using json = nlohmann::ordered_json;

std::string normalize_experience_text(std::string_view text) {
  std::string out;
  for (const auto& word : split_whitespace(text)) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

namespace {

std::optional<std::string> text_violation(const std::string& text, int max_words) {
  std::size_t words = count_words(text);
  if (words == 0) return "empty experience text";
  if (words > static_cast<std::size_t>(max_words)) {
    return "experience has " + std::to_string(words) + " words, cap is " + std::to_string(max_words);
  }
  return std::nullopt;
}

void remove_entry(ExperienceLibrary& lib, std::string_view id) {
  lib.entries.erase(std::remove_if(lib.entries.begin(), lib.entries.end(),
                                   [&](const Experience& e) { return e.id == id; }),
                    lib.entries.end());
}

}  // namespace

std::optional<std::string> apply_op(ExperienceLibrary& working, const LibraryOp& op,
                                    std::int64_t step, int max_experience_words) {
  if (auto bad = op_shape_violation(op)) return bad;
  std::string text = op.text ? normalize_experience_text(*op.text) : std::string();
  switch (op.kind) {
    case OpKind::keep:
      return std::nullopt;
    case OpKind::add: {
      if (auto bad = text_violation(text, max_experience_words)) return bad;
      working.entries.push_back({mint_experience_id(working.next_id), text, step, step});
      ++working.next_id;
      return std::nullopt;
    }
    case OpKind::del: {
      if (!working.find(*op.target_id)) return "unknown id " + *op.target_id;
      remove_entry(working, *op.target_id);
      return std::nullopt;
    }
    case OpKind::modify: {
      Experience* target = working.find(*op.target_id);
      if (!target) return "unknown id " + *op.target_id;
      if (auto bad = text_violation(text, max_experience_words)) return bad;
      target->text = text;
      target->updated_step = step;
      return std::nullopt;
    }
    case OpKind::merge: {
      std::set<std::string> distinct(op.merged_from->begin(), op.merged_from->end());
      if (distinct.size() != op.merged_from->size()) return "merge lists an id twice";
      for (const auto& id : *op.merged_from) {
        if (!working.find(id)) return "unknown id " + id;
      }
      if (auto bad = text_violation(text, max_experience_words)) return bad;
      for (const auto& id : *op.merged_from) remove_entry(working, id);
      working.entries.push_back({mint_experience_id(working.next_id), text, step, step});
      ++working.next_id;
      return std::nullopt;
    }
  }
  return "unknown op kind";
}

OptimizeResult apply_ops(const ExperienceLibrary& lib, std::span<const LibraryOp> ops,
                         int max_experience_words) {
  OptimizeResult result;
  result.library = lib;
  const std::int64_t step = lib.step + 1;
  for (const auto& op : ops) {
    if (auto reason = apply_op(result.library, op, step, max_experience_words)) {
      result.rejected.push_back({op, *reason});
    } else {
      result.applied.push_back(op);
    }
  }
  result.library.step = step;
  return result;
}

// ---------------------------------------------------------------------------

namespace {

// Makes model-written JSON parseable: drops `#` and `//` comments and `...`
// placeholders outside strings, then trailing commas before a closer.
std::string sanitize_json(std::string_view s) {
  std::string stage;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      stage.push_back(c);
      if (c == '\\' && i + 1 < s.size()) {
        stage.push_back(s[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      stage.push_back(c);
    } else if (c == '#' || (c == '/' && i + 1 < s.size() && s[i + 1] == '/')) {
      while (i + 1 < s.size() && s[i + 1] != '\n') ++i;
    } else if (s.substr(i, 3) == "...") {
      i += 2;
    } else {
      stage.push_back(c);
    }
  }
  std::string out;
  in_string = false;
  for (std::size_t i = 0; i < stage.size(); ++i) {
    char c = stage[i];
    if (in_string) {
      out.push_back(c);
      if (c == '\\' && i + 1 < stage.size()) {
        out.push_back(stage[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') in_string = true;
    if (c == ',') {
      std::size_t j = i + 1;
      while (j < stage.size() && is_ascii_space(stage[j])) ++j;
      if (j < stage.size() && (stage[j] == ']' || stage[j] == '}')) continue;
    }
    out.push_back(c);
  }
  return out;
}

std::optional<json> parse_array(std::string_view candidate) {
  json doc = json::parse(sanitize_json(candidate), nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) return std::nullopt;
  return doc;
}

struct Fence {
  std::size_t start;  // offset of the opening fence line
  std::string body;
};

std::vector<Fence> fenced_blocks(std::string_view text) {
  std::vector<Fence> out;
  std::size_t pos = 0;
  while ((pos = text.find("```", pos)) != std::string_view::npos) {
    std::size_t body_start = text.find('\n', pos);
    if (body_start == std::string_view::npos) break;
    ++body_start;
    std::size_t close = text.find("```", body_start);
    if (close == std::string_view::npos) break;
    out.push_back({pos, std::string(text.substr(body_start, close - body_start))});
    pos = close + 3;
  }
  return out;
}

std::optional<std::string> string_field(const json& item, const char* key) {
  auto it = item.find(key);
  if (it == item.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

ParsedOps parse_op_list(std::string_view reply) {
  std::optional<json> list;
  std::size_t list_start = std::string_view::npos;
  auto fences = fenced_blocks(reply);
  for (auto it = fences.rbegin(); it != fences.rend() && !list; ++it) {
    if ((list = parse_array(it->body))) list_start = it->start;
  }
  if (!list) {
    auto close = reply.rfind(']');
    for (std::size_t open = close == std::string_view::npos ? std::string_view::npos : reply.rfind('[', close);
         open != std::string_view::npos; open = open == 0 ? std::string_view::npos : reply.rfind('[', open - 1)) {
      auto candidate = parse_array(reply.substr(open, close - open + 1));
      if (candidate && std::all_of(candidate->begin(), candidate->end(),
                                   [](const json& e) { return e.is_object(); })) {
        list = std::move(candidate);
        list_start = open;
        break;
      }
    }
  }
  if (!list) throw Error(ErrorCode::parse_failure, "no JSON operation list in reply");

  ParsedOps parsed;
  parsed.rationale = std::string(trim(reply.substr(0, list_start)));
  for (const auto& item : *list) {
    if (!item.is_object()) {
      parsed.rejected.push_back(item.dump());
      continue;
    }
    auto option = string_field(item, "option");
    auto kind = option ? parse_op_kind(to_lower_ascii(trim(*option))) : std::nullopt;
    if (!kind) {
      parsed.rejected.push_back(item.dump());
      continue;
    }
    LibraryOp op;
    op.kind = *kind;
    switch (*kind) {
      case OpKind::add:
        op.text = string_field(item, "experience");
        break;
      case OpKind::modify:
        op.text = string_field(item, "experience");
        op.target_id = string_field(item, "modified_from");
        break;
      case OpKind::del:
        op.target_id = string_field(item, "delete_id");
        break;
      case OpKind::merge: {
        op.text = string_field(item, "experience");
        auto from = item.find("merged_from");
        if (from != item.end() && from->is_array() &&
            std::all_of(from->begin(), from->end(), [](const json& e) { return e.is_string(); })) {
          op.merged_from = from->get<std::vector<std::string>>();
        }
        break;
      }
      case OpKind::keep:
        break;
    }
    parsed.ops.push_back(std::move(op));
  }
  return parsed;
}

std::string ops_to_json(std::span<const LibraryOp> ops) {
  json list = json::array();
  for (const auto& op : ops) {
    json item;
    item["option"] = std::string(to_string(op.kind));
    if (op.text) item["experience"] = *op.text;
    if (op.kind == OpKind::modify && op.target_id) item["modified_from"] = *op.target_id;
    if (op.kind == OpKind::del && op.target_id) item["delete_id"] = *op.target_id;
    if (op.merged_from) item["merged_from"] = *op.merged_from;
    list.push_back(std::move(item));
  }
  return list.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string render_trajectory(const Trajectory& traj) {
  std::string out;
  for (std::size_t i = 0; i < traj.messages.size(); ++i) {
    const auto& m = traj.messages[i];
    if (m.role == Role::system) continue;
    if (!out.empty()) out += "\n\n";
    out += "[" + std::string(to_string(m.role)) + "]\n" + m.content;
  }
  out += "\n\n[final answer] ";
  out += traj.final_answer ? *traj.final_answer
                           : "none (" + std::string(to_string(traj.terminated_reason)) + ")";
  return out;
}

std::string render_summaries(std::span<const TrajectorySummary> summaries) {
  std::string out;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += "Trajectory " + std::to_string(i + 1) + ":\n" + summaries[i].text;
  }
  return out;
}

std::string render_suggestions(std::span<const SemanticAdvantage> advantages) {
  std::string out;
  for (std::size_t i = 0; i < advantages.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += "Problem " + advantages[i].query_id + ":\n" + ops_to_json(advantages[i].ops);
  }
  return out;
}

}  // namespace tfgrpo
