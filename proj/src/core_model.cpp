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

#include "tfgrpo/core_model.hpp"

#include <charconv>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "tfgrpo/error.hpp"
#include "tfgrpo/text_util.hpp"

namespace tfgrpo {

using json = nlohmann::ordered_json;

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::gateway_error: return "gateway_error";
    case ErrorCode::script_exhausted: return "script_exhausted";
    case ErrorCode::missing_binding: return "missing_binding";
    case ErrorCode::sandbox_unreachable: return "sandbox_unreachable";
    case ErrorCode::no_backend: return "no_backend";
    case ErrorCode::fetch_failed: return "fetch_failed";
    case ErrorCode::judge_unparseable: return "judge_unparseable";
    case ErrorCode::empty_group: return "empty_group";
    case ErrorCode::parse_failure: return "parse_failure";
    case ErrorCode::malformed_line: return "malformed_line";
    case ErrorCode::duplicate_id: return "duplicate_id";
    case ErrorCode::n_too_large: return "n_too_large";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::config_invalid: return "config_invalid";
    case ErrorCode::checkpoint_invalid: return "checkpoint_invalid";
    case ErrorCode::run_failed: return "run_failed";
  }
  return "unknown";
}

std::string_view to_string(DomainTag tag) {
  switch (tag) {
    case DomainTag::math: return "math";
    case DomainTag::web: return "web";
    case DomainTag::other: return "other";
  }
  return "other";
}

std::optional<DomainTag> parse_domain_tag(std::string_view text) {
  if (text == "math") return DomainTag::math;
  if (text == "web") return DomainTag::web;
  if (text == "other") return DomainTag::other;
  return std::nullopt;
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
    case Role::tool: return "tool";
  }
  return "user";
}

std::string_view to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::answered: return "answered";
    case TerminationReason::turn_limit: return "turn_limit";
    case TerminationReason::gateway_error: return "gateway_error";
    case TerminationReason::parse_failure: return "parse_failure";
  }
  return "turn_limit";
}

std::size_t Trajectory::assistant_turns() const {
  std::size_t n = 0;
  for (const auto& m : messages) n += m.role == Role::assistant ? 1 : 0;
  return n;
}

std::vector<double> RolloutGroup::rewards() const {
  std::vector<double> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.reward.value);
  return out;
}

const Experience* ExperienceLibrary::find(std::string_view id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

Experience* ExperienceLibrary::find(std::string_view id) {
  for (auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::add: return "add";
    case OpKind::del: return "delete";
    case OpKind::modify: return "modify";
    case OpKind::merge: return "merge";
    case OpKind::keep: return "keep";
  }
  return "keep";
}

std::optional<OpKind> parse_op_kind(std::string_view text) {
  if (text == "add") return OpKind::add;
  if (text == "delete") return OpKind::del;
  if (text == "modify") return OpKind::modify;
  if (text == "merge") return OpKind::merge;
  if (text == "keep") return OpKind::keep;
  return std::nullopt;
}

LibraryOp LibraryOp::add(std::string text) {
  LibraryOp op;
  op.kind = OpKind::add;
  op.text = std::move(text);
  return op;
}

LibraryOp LibraryOp::remove(std::string target_id) {
  LibraryOp op;
  op.kind = OpKind::del;
  op.target_id = std::move(target_id);
  return op;
}

LibraryOp LibraryOp::modify(std::string target_id, std::string text) {
  LibraryOp op;
  op.kind = OpKind::modify;
  op.target_id = std::move(target_id);
  op.text = std::move(text);
  return op;
}

LibraryOp LibraryOp::merge(std::vector<std::string> ids, std::string text) {
  LibraryOp op;
  op.kind = OpKind::merge;
  op.merged_from = std::move(ids);
  op.text = std::move(text);
  return op;
}

LibraryOp LibraryOp::keep() { return LibraryOp{}; }

std::optional<std::string> op_shape_violation(const LibraryOp& op) {
  switch (op.kind) {
    case OpKind::add:
      if (!op.text) return "add requires text";
      if (op.target_id || op.merged_from) return "add carries extra fields";
      break;
    case OpKind::del:
      if (!op.target_id) return "delete requires target_id";
      if (op.text || op.merged_from) return "delete carries extra fields";
      break;
    case OpKind::modify:
      if (!op.text || !op.target_id) return "modify requires text and target_id";
      if (op.merged_from) return "modify carries extra fields";
      break;
    case OpKind::merge:
      if (!op.text) return "merge requires text";
      if (!op.merged_from || op.merged_from->size() < 2) return "merge requires at least 2 ids";
      if (op.target_id) return "merge carries extra fields";
      break;
    case OpKind::keep:
      if (op.text || op.target_id || op.merged_from) return "keep carries extra fields";
      break;
  }
  return std::nullopt;
}

std::vector<std::string> LearnConfig::violations() const {
  std::vector<std::string> out;
  if (epochs < 1) out.push_back("epochs must be >= 1");
  if (batches_per_epoch < 1) out.push_back("batches_per_epoch must be >= 1");
  if (group_size < 1) out.push_back("group_size must be >= 1");
  if (learn_temperature < 0) out.push_back("learn_temperature must be >= 0");
  if (eval_temperature < 0) out.push_back("eval_temperature must be >= 0");
  if (max_ops_per_group < 0) out.push_back("max_ops_per_group must be >= 0");
  if (max_experience_words < 1) out.push_back("max_experience_words must be >= 1");
  if (max_turns < 1) out.push_back("max_turns must be >= 1");
  if (concurrency < 1) out.push_back("concurrency must be >= 1");
  return out;
}

std::size_t count_words(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_ascii_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

std::string mint_experience_id(std::int64_t number) { return "G" + std::to_string(number); }

std::optional<std::int64_t> minted_id_number(std::string_view id) {
  if (id.size() < 2 || id.front() != 'G' || id[1] == '0') return std::nullopt;
  std::int64_t value = 0;
  auto digits = id.substr(1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || value <= 0) return std::nullopt;
  return value;
}

std::vector<std::string> validate_library(const ExperienceLibrary& lib, int max_experience_words) {
  std::vector<std::string> out;
  if (lib.next_id < 1) out.push_back("next_id must be positive");
  if (lib.step < 0) out.push_back("step must be non-negative");
  std::map<std::string, int> seen;
  for (const auto& e : lib.entries) {
    if (e.id.empty()) out.push_back("experience with empty id");
    if (++seen[e.id] == 2) out.push_back("duplicate id " + e.id);
    std::size_t words = count_words(e.text);
    if (words == 0) out.push_back("experience " + e.id + " has empty text");
    if (words > static_cast<std::size_t>(max_experience_words)) {
      out.push_back("experience " + e.id + " has " + std::to_string(words) + " words, cap is " +
                    std::to_string(max_experience_words));
    }
    if (e.updated_step < e.created_step) {
      out.push_back("experience " + e.id + " updated_step precedes created_step");
    }
    if (auto n = minted_id_number(e.id); n && *n >= lib.next_id) {
      out.push_back("experience " + e.id + " is not below next_id " + std::to_string(lib.next_id));
    }
  }
  return out;
}

std::string library_to_json(const ExperienceLibrary& lib) {
  json doc;
  doc["step"] = lib.step;
  doc["next_id"] = lib.next_id;
  json items = json::array();
  for (const auto& e : lib.entries) {
    items.push_back({{"id", e.id},
                     {"text", e.text},
                     {"created_step", e.created_step},
                     {"updated_step", e.updated_step}});
  }
  doc["experiences"] = std::move(items);
  return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

namespace {

std::int64_t require_int(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw Error(ErrorCode::checkpoint_invalid, std::string("missing integer field '") + key + "'");
  }
  return it->get<std::int64_t>();
}

std::string require_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::checkpoint_invalid, std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

ExperienceLibrary library_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::checkpoint_invalid, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::checkpoint_invalid, "checkpoint is not an object");
  ExperienceLibrary lib;
  lib.step = require_int(doc, "step");
  lib.next_id = require_int(doc, "next_id");
  auto items = doc.find("experiences");
  if (items == doc.end() || !items->is_array()) {
    throw Error(ErrorCode::checkpoint_invalid, "missing 'experiences' array");
  }
  for (const auto& item : *items) {
    if (!item.is_object()) throw Error(ErrorCode::checkpoint_invalid, "experience is not an object");
    Experience e;
    e.id = require_string(item, "id");
    e.text = require_string(item, "text");
    e.created_step = require_int(item, "created_step");
    e.updated_step = require_int(item, "updated_step");
    lib.entries.push_back(std::move(e));
  }
  std::set<std::string> ids;
  for (const auto& e : lib.entries) {
    if (!ids.insert(e.id).second) throw Error(ErrorCode::checkpoint_invalid, "duplicate id " + e.id);
  }
  if (lib.next_id < 1 || lib.step < 0) {
    throw Error(ErrorCode::checkpoint_invalid, "step/next_id out of range");
  }
  return lib;
}

void save_library(const ExperienceLibrary& lib, const std::filesystem::path& path) {
  write_file_atomic(path, library_to_json(lib));
}

ExperienceLibrary load_library(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::checkpoint_invalid, e.what());
  }
  return library_from_json(text);
}

}  // namespace tfgrpo
