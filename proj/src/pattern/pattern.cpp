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

#include "pfuzz/pattern/pattern.hpp"

#include <algorithm>
#include <map>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/field_block.hpp"
#include "pfuzz/common/text.hpp"
#include "pfuzz/llm/structured.hpp"

namespace pfuzz::pattern {

std::string_view to_string(BugCategory c) {
  switch (c) {
    case BugCategory::kEagerVsCompiled: return "Eager vs Compiled";
    case BugCategory::kEagerVsJit: return "Eager vs Just-In-Time (JIT)";
    case BugCategory::kCpuVsGpu: return "CPU vs GPU";
    case BugCategory::kPerformanceDegradation: return "Performance degradation";
    case BugCategory::kWrongSaveReload: return "Wrong save/reload";
    case BugCategory::kWrongDisplayedMessage: return "Wrong displayed message";
    case BugCategory::kWrongGradient: return "Wrong gradient";
    case BugCategory::kWrongOutputs: return "Wrong outputs";
    case BugCategory::kFunctionalityNotAsExpected: return "Functionality Not Working as Expected";
    case BugCategory::kCrash: return "Crash";
  }
  return "?";
}

BugCategory normalize_category(std::string_view label) {
  static const std::map<std::string, BugCategory> table = [] {
    std::map<std::string, BugCategory> t;
    for (BugCategory c : kAllCategories) t[squash_alnum(to_string(c))] = c;
    const std::pair<const char*, BugCategory> aliases[] = {
        {"eagervscompile", BugCategory::kEagerVsCompiled},
        {"eagercompiledmismatch", BugCategory::kEagerVsCompiled},
        {"eagervsjit", BugCategory::kEagerVsJit},
        {"eagervsjustintime", BugCategory::kEagerVsJit},
        {"cpuvscuda", BugCategory::kCpuVsGpu},
        {"cpugpuinconsistency", BugCategory::kCpuVsGpu},
        {"deviceinconsistency", BugCategory::kCpuVsGpu},
        {"performanceregression", BugCategory::kPerformanceDegradation},
        {"wrongsavereloadbehavior", BugCategory::kWrongSaveReload},
        {"wrongsaveload", BugCategory::kWrongSaveReload},
        {"wrongerrormessage", BugCategory::kWrongDisplayedMessage},
        {"wronggradients", BugCategory::kWrongGradient},
        {"wrongoutput", BugCategory::kWrongOutputs},
        {"functionalitynotworkingasintended", BugCategory::kFunctionalityNotAsExpected},
        {"crashes", BugCategory::kCrash},
        {"segfault", BugCategory::kCrash},
        {"segmentationfault", BugCategory::kCrash},
    };
    for (const auto& [k, v] : aliases) t[k] = v;
    return t;
  }();
  auto it = table.find(squash_alnum(label));
  if (it == table.end())
    throw ParseError("unknown bug category '" + std::string(label) + "'");
  return it->second;
}

void BugPattern::validate() const {
  if (trim(bug_api).empty()) throw InvariantError("pattern without a bug API");
  if (trim(triggering_context).empty())
    throw InvariantError("pattern for " + bug_api + " without a triggering context");
  if (trim(oracle_design).empty())
    throw InvariantError("pattern for " + bug_api + " without an oracle design");
}

Json BugPattern::to_json() const {
  return {{"source_issue", {{"repo", source_issue.repo}, {"number", source_issue.number}}},
          {"bug_api", bug_api},
          {"bug_category", to_string(bug_category)},
          {"triggering_context", triggering_context},
          {"oracle_design", oracle_design},
          {"expected_behavior", expected_behavior},
          {"actual_behavior", actual_behavior},
          {"repro_program", repro_program}};
}

BugPattern BugPattern::from_json(const Json& j) {
  BugPattern p;
  const Json& src = require_field(j, "source_issue");
  p.source_issue = {require_string(src, "repo"), static_cast<int>(require_int(src, "number"))};
  p.bug_api = require_string(j, "bug_api");
  p.bug_category = normalize_category(require_string(j, "bug_category"));
  p.triggering_context = require_string(j, "triggering_context");
  p.oracle_design = require_string(j, "oracle_design");
  p.expected_behavior = require_string(j, "expected_behavior");
  p.actual_behavior = require_string(j, "actual_behavior");
  p.repro_program = require_string(j, "repro_program");
  p.validate();
  return p;
}

BugPattern parse_pattern_response(std::string_view text, const corpus::IssueRef& source) {
  FieldBlock block = FieldBlock::parse(text, "PATTERN");
  BugPattern p;
  p.source_issue = source;
  p.bug_api = block.require("bug_api");
  p.bug_category = normalize_category(block.require("bug_category"));
  p.triggering_context = block.require("triggering_context");
  p.oracle_design = block.require("oracle_design");
  p.expected_behavior = block.require("expected_behavior");
  p.actual_behavior = block.require("actual_behavior");
  p.repro_program = block.require("repro_program");
  if (!delimiters_balanced(p.repro_program))
    throw ParseError("repro_program has unbalanced delimiters");
  return p;
}

std::string render_pattern_response(const BugPattern& p) {
  return FieldBlock::render("PATTERN", {{"bug_api", p.bug_api},
                                        {"bug_category", std::string(to_string(p.bug_category))},
                                        {"triggering_context", p.triggering_context},
                                        {"oracle_design", p.oracle_design},
                                        {"expected_behavior", p.expected_behavior},
                                        {"actual_behavior", p.actual_behavior},
                                        {"repro_program", p.repro_program}});
}

std::string format_comments(const std::vector<corpus::Comment>& comments) {
  if (comments.empty()) return "(none)";
  std::string out;
  for (const auto& c : comments) {
    if (!out.empty()) out += "\n\n";
    out += (c.author.empty() ? std::string("anonymous") : c.author) + ": " + c.text;
  }
  return out;
}

BugPattern extract_pattern(const corpus::IssueRecord& issue, const corpus::PullRequestRecord& pr,
                           llm::Gateway& gateway) {
  std::string categories;
  for (BugCategory c : kAllCategories) {
    if (!categories.empty()) categories += "; ";
    categories += to_string(c);
  }
  auto request = gateway.make_request(
      llm::TemplateId::kPatternExtraction,
      {{"repo", issue.repo},
       {"issue_number", std::to_string(issue.number)},
       {"issue_title", issue.title},
       {"issue_body", issue.body},
       {"issue_comments", format_comments(issue.comments)},
       {"pr_number", std::to_string(pr.number)},
       {"pr_title", pr.title},
       {"pr_description", pr.description},
       {"pr_diff", pr.diff_text.empty() ? std::string("(not available)") : pr.diff_text},
       {"categories", categories}});
  auto parsed = llm::ask_parsed(gateway, request, [&](const std::string& text) {
    return parse_pattern_response(text, issue.ref());
  });
  return parsed.value;
}

void save_patterns(const std::filesystem::path& path, std::vector<BugPattern> patterns) {
  std::sort(patterns.begin(), patterns.end(),
            [](const auto& a, const auto& b) { return a.source_issue < b.source_issue; });
  std::vector<Json> docs;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (i > 0 && patterns[i].source_issue == patterns[i - 1].source_issue)
      throw InvariantError("two patterns for " + patterns[i].source_issue.str());
    docs.push_back(patterns[i].to_json());
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_jsonl(path, docs);
}

std::vector<BugPattern> load_patterns(const std::filesystem::path& path) {
  std::vector<BugPattern> out;
  for (const auto& doc : read_jsonl(path)) out.push_back(BugPattern::from_json(doc));
  return out;
}

}  // namespace pfuzz::pattern
