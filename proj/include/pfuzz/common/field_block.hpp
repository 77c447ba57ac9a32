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

#ifndef PFUZZ_COMMON_FIELD_BLOCK_HPP_
#define PFUZZ_COMMON_FIELD_BLOCK_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pfuzz {

// Structured LLM answers use a fenced, field-labeled block:
//
//   === VERDICT ===
//   @same_pattern: no
//   @reasoning: the triggered oracle inspects the error message
//   which the original never did
//   === END ===
//
// A field starts at a line matching `@name:`; its value runs until the next
// field line or the closing fence. Values are trimmed. Text outside the block
// is ignored, so models may think aloud before answering.
class FieldBlock {
 public:
  /// Parses the first `=== <name> ===` block. Throws ParseError when the block
  /// is missing or unterminated, or a field repeats.
  static FieldBlock parse(std::string_view text, std::string_view block_name);

  bool has(std::string_view field) const;
  // ParseError("missing field '<field>'") when absent or empty.
  const std::string& require(std::string_view field) const;
  std::optional<std::string> get(std::string_view field) const;

  /// yes/no answer: the first word of the value, case-insensitive, must be
  /// one of yes/true or no/false.
  bool require_bool(std::string_view field) const;

  const std::vector<std::pair<std::string, std::string>>& fields() const {
    return fields_;
  }

  /// Inverse of parse for a list of (field, value) pairs.
  static std::string render(std::string_view block_name,
                            const std::vector<std::pair<std::string, std::string>>& fields);

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

}  // namespace pfuzz

#endif  // PFUZZ_COMMON_FIELD_BLOCK_HPP_
