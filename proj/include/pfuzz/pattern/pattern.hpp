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

#ifndef PFUZZ_PATTERN_PATTERN_HPP_
#define PFUZZ_PATTERN_PATTERN_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pfuzz/common/jsonl.hpp"
#include "pfuzz/corpus/records.hpp"
#include "pfuzz/llm/gateway.hpp"

namespace pfuzz::pattern {

// Nine kinds of silent bug plus crashes.
enum class BugCategory {
  kEagerVsCompiled,
  kEagerVsJit,
  kCpuVsGpu,
  kPerformanceDegradation,
  kWrongSaveReload,
  kWrongDisplayedMessage,
  kWrongGradient,
  kWrongOutputs,
  kFunctionalityNotAsExpected,
  kCrash,
};

inline constexpr BugCategory kAllCategories[] = {
    BugCategory::kEagerVsCompiled,        BugCategory::kEagerVsJit,
    BugCategory::kCpuVsGpu,               BugCategory::kPerformanceDegradation,
    BugCategory::kWrongSaveReload,        BugCategory::kWrongDisplayedMessage,
    BugCategory::kWrongGradient,          BugCategory::kWrongOutputs,
    BugCategory::kFunctionalityNotAsExpected, BugCategory::kCrash,
};

// Canonical display name, e.g. "Wrong gradient".
std::string_view to_string(BugCategory c);
inline bool is_silent(BugCategory c) { return c != BugCategory::kCrash; }

/// Maps a free-text label to a category, ignoring case, spacing and
/// punctuation, with a few common aliases ("cpu/gpu inconsistency",
/// "segfault", ...). Anything else throws ParseError; we never guess.
BugCategory normalize_category(std::string_view label);

/// What one fixed issue teaches: the API, the context that triggers the bug,
/// and how to tell it happened.
struct BugPattern {
  corpus::IssueRef source_issue;
  std::string bug_api;
  BugCategory bug_category = BugCategory::kWrongOutputs;
  std::string triggering_context;
  std::string oracle_design;
  std::string expected_behavior;
  std::string actual_behavior;
  std::string repro_program;

  void validate() const;
  Json to_json() const;
  static BugPattern from_json(const Json& j);
  friend bool operator==(const BugPattern&, const BugPattern&) = default;
};

/// Parses the PATTERN block of an extraction answer. Throws ParseError on a
/// missing field, an unknown category or an unbalanced reproducer.
BugPattern parse_pattern_response(std::string_view text, const corpus::IssueRef& source);

/// The PATTERN block parse_pattern_response accepts for `p`.
std::string render_pattern_response(const BugPattern& p);

/// One extraction round trip with up to three format-repair re-asks.
BugPattern extract_pattern(const corpus::IssueRecord& issue,
                           const corpus::PullRequestRecord& pr, llm::Gateway& gateway);

// Comment thread flattened for prompts: "author: text" blocks.
std::string format_comments(const std::vector<corpus::Comment>& comments);

// patterns.jsonl, one pattern per source issue, sorted by issue.
void save_patterns(const std::filesystem::path& path, std::vector<BugPattern> patterns);
std::vector<BugPattern> load_patterns(const std::filesystem::path& path);

}  // namespace pfuzz::pattern

#endif  // PFUZZ_PATTERN_PATTERN_HPP_
