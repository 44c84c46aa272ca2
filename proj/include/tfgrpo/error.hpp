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

#include <stdexcept>
#include <string>
#include <string_view>

namespace tfgrpo {

enum class ErrorCode {
  invalid_argument,
  gateway_error,
  script_exhausted,
  missing_binding,
  sandbox_unreachable,
  no_backend,
  fetch_failed,
  judge_unparseable,
  empty_group,
  parse_failure,
  malformed_line,
  duplicate_id,
  n_too_large,
  io_error,
  config_invalid,
  checkpoint_invalid,
  run_failed,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the framework carries one of the codes above so
/// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tfgrpo
