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

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tfgrpo/core_model.hpp"

namespace tfgrpo {

enum class TemplateName {
  // Method prompts, digest-pinned.
  react_system,
  experience_injection,
  summary,
  group_advantage,
  optimization,
  // Framework prompts.
  direct_system,
  react_web_system,
  judge,
  direct_experiences,
  nudge,
  reprompt_json,
  reprompt_judge,
  reprompt_lines,
};

std::string_view to_string(TemplateName name);
/// File name under prompts/, e.g. "summary.txt".
std::string template_file_name(TemplateName name);
std::vector<TemplateName> all_templates();
/// The five digest-pinned method templates.
std::vector<TemplateName> method_templates();

using Bindings = std::map<std::string, std::string, std::less<>>;

/// A prompt body with `{name}` placeholders (name = [a-z_]+). Braces that do
/// not enclose such a name, like the JSON samples, are literal text.
class Template {
 public:
  Template(TemplateName name, std::string body);

  static Template builtin(TemplateName name);

  TemplateName name() const { return name_; }
  const std::string& body() const { return body_; }
  std::set<std::string> placeholders() const;

  /// Substitutes every placeholder in a single pass; substituted text is never
  /// rescanned. Throws Error(missing_binding) naming the first absent key.
  std::string render(const Bindings& bindings) const;

  /// Drops each `<tag>...</tag>` block listed (plus its trailing blank line).
  /// Used for the ground-truth-free variants.
  Template without_blocks(const std::vector<std::string>& tags) const;

 private:
  TemplateName name_;
  std::string body_;
};

/// Raw embedded body, byte-identical to prompts/<file>.
std::string_view embedded_body(TemplateName name);

inline constexpr std::string_view kEmptyLibrarySentinel = "(no experiences yet)";

/// "[k]. text" lines numbered from 1 in library order.
std::string serialize_library(const ExperienceLibrary& lib);
/// "<id>: text" lines so operations can reference ids.
std::string serialize_library_with_ids(const ExperienceLibrary& lib);

}  // namespace tfgrpo
