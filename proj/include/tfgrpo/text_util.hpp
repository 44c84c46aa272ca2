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
#include <string>
#include <string_view>
#include <vector>

namespace tfgrpo {

bool is_ascii_space(char c);
std::string_view trim(std::string_view text);
std::vector<std::string> split_whitespace(std::string_view text);
std::vector<std::string> split_lines(std::string_view text);
std::string to_lower_ascii(std::string_view text);
bool starts_with(std::string_view text, std::string_view prefix);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so readers never observe a
/// half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// Cuts `text` to at most `limit` bytes without splitting a UTF-8 sequence and
/// appends a marker naming how many bytes were dropped.
std::string truncate_with_marker(std::string_view text, std::size_t limit);

}  // namespace tfgrpo
