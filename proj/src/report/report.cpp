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

#include "pfuzz/report/report.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/text.hpp"

namespace pfuzz::report {

namespace fs = std::filesystem;

namespace {

std::string cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out;
}

void table(std::ostringstream& os, std::string_view head,
           const std::map<std::string, std::size_t>& counts) {
  os << "| " << head << " | Findings |\n|---|---:|\n";
  for (const auto& [k, n] : counts) os << "| " << cell(k) << " | " << n << " |\n";
  os << '\n';
}

// candidate id -> final, for one campaign.
std::map<std::string, bool> verdict_index(const fs::path& dir, std::vector<Problem>& problems) {
  std::map<std::string, bool> out;
  const fs::path path = dir / "verdicts.jsonl";
  if (!fs::exists(path)) return out;
  auto docs = read_jsonl_lenient(path, [&](int line, const std::string& msg) {
    problems.push_back({path, "line " + std::to_string(line) + ": " + msg});
  });
  for (const auto& d : docs) {
    try {
      auto v = validator::ValidationVerdict::from_json(d);
      out[v.candidate_id] = v.final;
    } catch (const Error& e) {
      problems.push_back({path, e.what()});
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> target_set(const engine::Finding& f) {
  std::set<std::string> names;
  std::string_view s = f.target_api;
  while (!s.empty()) {
    auto comma = s.find(',');
    std::string name = trim(s.substr(0, comma));
    if (!name.empty()) names.insert(name);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return {names.begin(), names.end()};
}

std::vector<engine::Finding> dedup_findings(const std::vector<engine::Finding>& findings) {
  using Key = std::tuple<corpus::IssueRef, std::vector<std::string>, pattern::BugCategory>;
  std::set<Key> seen;
  std::vector<engine::Finding> out;
  for (const auto& f : findings)
    if (seen.insert({f.source_issue, target_set(f), f.bug_category}).second) out.push_back(f);
  return out;
}

std::vector<fs::path> find_campaigns(const fs::path& root) {
  if (fs::exists(root / "snapshot.json")) return {root};
  std::vector<fs::path> out;
  if (!fs::is_directory(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() == "snapshot.json")
      out.push_back(e.path().parent_path());
  std::sort(out.begin(), out.end());
  return out;
}

Report collect_report(const fs::path& root) {
  Report r;
  for (auto c : pattern::kAllCategories) r.by_category[std::string(pattern::to_string(c))] = 0;

  std::vector<engine::Finding> all;
  for (const auto& dir : find_campaigns(root)) {
    engine::CampaignSnapshot snap;
    try {
      snap = engine::CampaignSnapshot::load(dir / "snapshot.json");
    } catch (const Error& e) {
      r.problems.push_back({dir / "snapshot.json", e.what()});
      continue;
    }
    ++r.campaigns;
    r.tests += snap.state.tests_generated;
    auto verdicts = verdict_index(dir, r.problems);
    for (const auto& f : snap.state.findings) {
      auto it = verdicts.find(f.verdict_id);
      if (it == verdicts.end() || !it->second) {
        r.problems.push_back({dir / "verdicts.jsonl",
                              "no final verdict for finding " + f.verdict_id + "; dropped"});
        continue;
      }
      all.push_back(f);
    }
  }
  r.findings = dedup_findings(all);
  for (const auto& f : r.findings) {
    ++r.by_category[std::string(pattern::to_string(f.bug_category))];
    ++r.by_oracle_kind[f.oracle_kind.empty() ? "unspecified" : f.oracle_kind];
  }
  return r;
}

std::string render_markdown(const Report& r) {
  std::ostringstream os;
  os << "<!-- " << kReportVersion << " -->\n"
     << "# Fuzzing report\n\n"
     << "Campaigns: " << r.campaigns << ", tests generated: " << r.tests
     << ", findings: " << r.findings.size() << "\n\n";
  os << "## Findings by category\n\n";
  table(os, "Bug Type", r.by_category);
  os << "## Oracle kinds\n\n";
  table(os, "Oracle kind", r.by_oracle_kind);
  os << "## Findings\n\n";
  if (r.findings.empty()) {
    os << "None.\n\n";
  } else {
    os << "| # | Bug Type | Bug API | Source Issue | Transfer path | Round |\n"
       << "|---:|---|---|---|---|---:|\n";
    for (std::size_t i = 0; i < r.findings.size(); ++i) {
      const auto& f = r.findings[i];
      os << "| " << i + 1 << " | " << pattern::to_string(f.bug_category) << " | "
         << cell(f.target_api) << " | " << f.source_issue.str() << " | "
         << cell(f.source_issue.str() + " -> " + f.source_api + " -> " + f.target_api) << " | "
         << f.round << " |\n";
    }
    os << '\n';
  }
  if (!r.problems.empty()) {
    os << "## Unreadable artifacts\n\n";
    for (const auto& p : r.problems) os << "- `" << p.file.string() << "`: " << cell(p.message) << '\n';
    os << '\n';
  }
  return os.str();
}

Report emit_report(const fs::path& root, const fs::path& out) {
  Report r = collect_report(root);
  fs::create_directories(out);
  write_file_atomic(out / "report.md", render_markdown(r));
  std::vector<Json> lines;
  for (const auto& f : r.findings) {
    Json j = f.to_json();
    j["version"] = std::string(kFindingsVersion);
    lines.push_back(std::move(j));
  }
  write_jsonl(out / "findings.jsonl", lines);
  return r;
}

}  // namespace pfuzz::report
