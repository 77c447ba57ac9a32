// Copyright 2026 The patternfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PFUZZ_COMMON_TEXT_HPP_
#define PFUZZ_COMMON_TEXT_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pfuzz {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);

// Lowercase and drop everything that is not [a-z0-9].
std::string squash_alnum(std::string_view s);

/// Hex SHA-256 of the bytes of `data`.
std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

/// Replaces every `{{name}}` in `tmpl` with `slots.at(name)`.
/// Throws InvariantError when a placeholder has no slot value.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& slots);

/// True iff some line of `text` is exactly `marker` (no trimming, no case
/// folding).
bool has_exact_line(std::string_view text, std::string_view marker);

/// Balanced (), [] and {} outside of string literals and comments. Only a
/// plausibility check for generated Python source.
bool delimiters_balanced(std::string_view source);

}  // namespace pfuzz

#endif  // PFUZZ_COMMON_TEXT_HPP_
