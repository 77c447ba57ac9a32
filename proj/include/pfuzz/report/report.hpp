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

#ifndef PFUZZ_REPORT_REPORT_HPP_
#define PFUZZ_REPORT_REPORT_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pfuzz/engine/campaign.hpp"

namespace pfuzz::report {

inline constexpr std::string_view kReportVersion = "patternfuzz-report/1";
inline constexpr std::string_view kFindingsVersion = "patternfuzz-findings/1";

// Target APIs of a finding as a sorted set. Interaction bugs name several
// APIs in one comma-separated target_api.
std::vector<std::string> target_set(const engine::Finding& f);

/// First occurrence kept per (source issue, target set, category).
std::vector<engine::Finding> dedup_findings(const std::vector<engine::Finding>& findings);

struct Problem {
  std::filesystem::path file;
  std::string message;
};

struct Report {
  std::vector<engine::Finding> findings;          // deduplicated, discovery order
  std::map<std::string, std::size_t> by_category;  // every category, zeros included
  std::map<std::string, std::size_t> by_oracle_kind;
  std::vector<Problem> problems;
  std::size_t campaigns = 0;
  std::size_t tests = 0;
};

/// Campaign directories under `root`: `root` itself when it holds a
/// snapshot.json, otherwise every directory below it that does, sorted.
std::vector<std::filesystem::path> find_campaigns(const std::filesystem::path& root);

/// Reads every campaign under `root`. A corrupt snapshot or verdict file is
/// recorded as a Problem and the rest is still read. A finding whose verdict
/// is missing or not final is dropped with a Problem.
Report collect_report(const std::filesystem::path& root);

std::string render_markdown(const Report& r);

/// collect_report, then writes report.md and findings.jsonl into `out`.
Report emit_report(const std::filesystem::path& root, const std::filesystem::path& out);

}  // namespace pfuzz::report

#endif  // PFUZZ_REPORT_REPORT_HPP_
