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

#ifndef PFUZZ_ENGINE_TRANSFER_HPP_
#define PFUZZ_ENGINE_TRANSFER_HPP_

#include <string>
#include <string_view>

#include "pfuzz/common/jsonl.hpp"
#include "pfuzz/llm/gateway.hpp"
#include "pfuzz/matcher/catalog.hpp"
#include "pfuzz/pattern/pattern.hpp"

namespace pfuzz::engine {

inline constexpr std::string_view kOracleKinds[] = {
    "crash_detection",        "value_conformance",  "error_message_analysis",
    "special_value_detection", "device_consistency", "eager_compile_consistency",
    "eager_jit_consistency",
};

// Throws ParseError for a kind outside kOracleKinds.
std::string normalize_oracle_kind(std::string_view kind);

struct TransferredTest {
  corpus::IssueRef source_issue;
  std::string source_api;
  std::string target_api;
  std::string program_source;
  std::string adapted_context;
  std::string adapted_oracle;
  std::string oracle_kind;
  std::string rationale;

  void validate() const;
  Json to_json() const;
  static TransferredTest from_json(const Json& j);
  friend bool operator==(const TransferredTest&, const TransferredTest&) = default;
};

/// Reads a TEST block. The program must print the bug marker and have
/// balanced delimiters; anything else is a ParseError so the caller re-asks.
TransferredTest parse_transfer_response(std::string_view text, const pattern::BugPattern& pattern,
                                        const std::string& target_api);

std::string render_transfer_response(const TransferredTest& t);

/// Adapts `pattern` to `target`. Throws InvariantError when the target is the
/// pattern's own API, ParseError when no usable test comes back.
TransferredTest transfer_bug(const pattern::BugPattern& pattern, const matcher::ApiRecord& target,
                             llm::Gateway& gateway);

}  // namespace pfuzz::engine

#endif  // PFUZZ_ENGINE_TRANSFER_HPP_
