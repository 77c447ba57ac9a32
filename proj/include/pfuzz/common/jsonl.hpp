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

#ifndef PFUZZ_COMMON_JSONL_HPP_
#define PFUZZ_COMMON_JSONL_HPP_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace pfuzz {

using Json = nlohmann::json;

/// Parses a line-delimited JSON file. Blank lines are skipped; a malformed
/// line throws ParseError naming the file and 1-based line number.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

/// Like read_jsonl, but invokes `on_error(line_no, message)` for bad lines
/// and keeps going.
std::vector<Json> read_jsonl_lenient(
    const std::filesystem::path& path,
    const std::function<void(int, const std::string&)>& on_error);

/// Rewrites `path` with one compact document per line.
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& docs);

/// Appends one compact document as a new line (creates the file if needed).
void append_jsonl(const std::filesystem::path& path, const Json& doc);

// Typed field accessors that throw ParseError with the field name.
std::string require_string(const Json& j, const char* field);
long long require_int(const Json& j, const char* field);
const Json& require_field(const Json& j, const char* field);

}  // namespace pfuzz

#endif  // PFUZZ_COMMON_JSONL_HPP_
