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

#include "pfuzz/corpus/records.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "pfuzz/common/error.hpp"

namespace pfuzz::corpus {

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::string regex_escape(const std::string& s) {
  static const std::regex special(R"([.^$|()\[\]{}*+?\\/])");
  return std::regex_replace(s, special, R"(\$&)");
}

void collect(const std::regex& re, const std::string& text, std::vector<int>& out) {
  for (std::sregex_iterator it(text.begin(), text.end(), re), end; it != end; ++it) {
    int n = 0;
    try {
      n = std::stoi((*it)[1].str());
    } catch (const std::out_of_range&) {
      continue;
    }
    if (n > 0) out.push_back(n);
  }
}

std::vector<std::string> string_list(const Json& j, const char* field) {
  const Json& v = require_field(j, field);
  if (!v.is_array()) throw ParseError(std::string("field '") + field + "' must be an array");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) throw ParseError(std::string("field '") + field + "' holds a non-string");
    out.push_back(s.get<std::string>());
  }
  return out;
}

void check_key(const std::string& repo, int number, const char* what) {
  if (repo.empty()) throw InvariantError(std::string(what) + " without a repo");
  if (number <= 0)
    throw InvariantError(std::string(what) + " " + repo + "#" + std::to_string(number) +
                         " has a non-positive number");
}

}  // namespace

void IssueRecord::validate() const {
  check_key(repo, number, "issue");
  if (!std::is_sorted(linked_pr_numbers.begin(), linked_pr_numbers.end()) ||
      std::adjacent_find(linked_pr_numbers.begin(), linked_pr_numbers.end()) !=
          linked_pr_numbers.end())
    throw InvariantError("issue " + ref().str() + " has unsorted or repeated PR links");
  for (int n : linked_pr_numbers)
    if (n <= 0) throw InvariantError("issue " + ref().str() + " links a non-positive PR");
}

Json IssueRecord::to_json() const {
  Json comments_json = Json::array();
  for (const auto& c : comments) comments_json.push_back({{"author", c.author}, {"text", c.text}});
  return {{"repo", repo},         {"number", number}, {"title", title},
          {"body", body},         {"labels", labels}, {"comments", comments_json},
          {"linked_pr_numbers", linked_pr_numbers}};
}

IssueRecord IssueRecord::from_json(const Json& j) {
  IssueRecord r;
  r.repo = require_string(j, "repo");
  r.number = static_cast<int>(require_int(j, "number"));
  r.title = require_string(j, "title");
  r.body = require_string(j, "body");
  r.labels = string_list(j, "labels");
  for (const auto& c : require_field(j, "comments"))
    r.comments.push_back({require_string(c, "author"), require_string(c, "text")});
  try {
    r.linked_pr_numbers = require_field(j, "linked_pr_numbers").get<std::vector<int>>();
  } catch (const Json::exception&) {
    throw ParseError("field 'linked_pr_numbers' must be an integer array");
  }
  r.validate();
  return r;
}

void PullRequestRecord::validate() const {
  check_key(repo, number, "pull request");
  if (diff_text.empty() && !changed_files.empty())
    throw InvariantError("pull request " + ref().str() + " changes files but has no diff");
}

Json PullRequestRecord::to_json() const {
  return {{"repo", repo},
          {"number", number},
          {"title", title},
          {"description", description},
          {"diff_text", diff_text},
          {"changed_files", changed_files}};
}

PullRequestRecord PullRequestRecord::from_json(const Json& j) {
  PullRequestRecord r;
  r.repo = require_string(j, "repo");
  r.number = static_cast<int>(require_int(j, "number"));
  r.title = require_string(j, "title");
  r.description = require_string(j, "description");
  r.diff_text = require_string(j, "diff_text");
  r.changed_files = string_list(j, "changed_files");
  r.validate();
  return r;
}

void Corpus::upsert(IssueRecord issue) {
  issue.linked_pr_numbers = sorted_unique(std::move(issue.linked_pr_numbers));
  issue.validate();
  auto key = issue.ref();
  issues_.insert_or_assign(std::move(key), std::move(issue));
}

void Corpus::upsert(PullRequestRecord pr) {
  pr.validate();
  auto key = pr.ref();
  prs_.insert_or_assign(std::move(key), std::move(pr));
}

const IssueRecord* Corpus::find_issue(const IssueRef& ref) const {
  auto it = issues_.find(ref);
  return it == issues_.end() ? nullptr : &it->second;
}

const PullRequestRecord* Corpus::find_pr(const IssueRef& ref) const {
  auto it = prs_.find(ref);
  return it == prs_.end() ? nullptr : &it->second;
}

std::vector<int> fix_links_in_issue(const std::string& repo, const std::string& text) {
  static const std::regex keyword(
      R"((?:fix(?:ed)?|resolved|closed|addressed)\s+(?:by|in|via|with)\s+(?:pr\s*|pull request\s*)?#(\d+))",
      std::regex::icase);
  std::vector<int> out;
  collect(keyword, text, out);
  collect(std::regex("github\\.com/" + regex_escape(repo) + "/pull/(\\d+)", std::regex::icase),
          text, out);
  return sorted_unique(std::move(out));
}

std::vector<int> hash_mentions(const std::string& text) {
  static const std::regex mention(R"((?:^|[^\w/&])#(\d+)\b)");
  std::vector<int> out;
  collect(mention, text, out);
  return sorted_unique(std::move(out));
}

std::vector<int> closing_refs_in_pr(const std::string& repo, const std::string& text) {
  static const std::regex keyword(
      R"(\b(?:fix(?:es|ed)?|close[sd]?|resolve[sd]?)\s*:?\s+#(\d+))", std::regex::icase);
  std::vector<int> out;
  collect(keyword, text, out);
  collect(std::regex("(?:fix(?:es|ed)?|close[sd]?|resolve[sd]?)\\s*:?\\s+https?://github\\.com/" +
                         regex_escape(repo) + "/issues/(\\d+)",
                     std::regex::icase),
          text, out);
  return sorted_unique(std::move(out));
}

void Corpus::relink() {
  std::map<IssueRef, std::set<int>> closed_by;
  for (const auto& [ref, pr] : prs_)
    for (int n : closing_refs_in_pr(ref.repo, pr.title + "\n" + pr.description))
      closed_by[{ref.repo, n}].insert(ref.number);

  for (auto& [ref, issue] : issues_) {
    std::string text = issue.title + "\n" + issue.body;
    for (const auto& c : issue.comments) text += "\n" + c.text;
    std::vector<int> links = fix_links_in_issue(ref.repo, text);
    for (int n : hash_mentions(text))
      if (n != ref.number && prs_.count({ref.repo, n})) links.push_back(n);
    if (auto it = closed_by.find(ref); it != closed_by.end())
      links.insert(links.end(), it->second.begin(), it->second.end());
    issue.linked_pr_numbers = sorted_unique(std::move(links));
  }
}

void Corpus::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::vector<Json> docs;
  for (const auto& [_, r] : issues_) docs.push_back(r.to_json());
  write_jsonl(dir / "issues.jsonl", docs);
  docs.clear();
  for (const auto& [_, r] : prs_) docs.push_back(r.to_json());
  write_jsonl(dir / "prs.jsonl", docs);
}

Corpus Corpus::load(const std::filesystem::path& dir) {
  Corpus c;
  if (std::filesystem::exists(dir / "issues.jsonl")) {
    for (const auto& doc : read_jsonl(dir / "issues.jsonl")) {
      auto r = IssueRecord::from_json(doc);
      if (c.issues_.count(r.ref())) throw InvariantError("duplicate issue " + r.ref().str());
      c.issues_.emplace(r.ref(), std::move(r));
    }
  }
  if (std::filesystem::exists(dir / "prs.jsonl")) {
    for (const auto& doc : read_jsonl(dir / "prs.jsonl")) {
      auto r = PullRequestRecord::from_json(doc);
      if (c.prs_.count(r.ref())) throw InvariantError("duplicate pull request " + r.ref().str());
      c.prs_.emplace(r.ref(), std::move(r));
    }
  }
  return c;
}

std::vector<std::pair<IssueRecord, PullRequestRecord>> select_fixed_issues(
    const Corpus& corpus) {
  std::vector<std::pair<IssueRecord, PullRequestRecord>> out;
  for (const auto& [ref, issue] : corpus.issues()) {
    // Links are sorted, so the last resolvable one is the most recent PR.
    for (auto it = issue.linked_pr_numbers.rbegin(); it != issue.linked_pr_numbers.rend(); ++it) {
      if (const auto* pr = corpus.find_pr({ref.repo, *it})) {
        out.emplace_back(issue, *pr);
        break;
      }
    }
  }
  return out;
}

}  // namespace pfuzz::corpus
