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

#include <algorithm>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/text.hpp"
#include "pfuzz/corpus/fetcher.hpp"

namespace pfuzz::corpus {

namespace {

std::string string_or_empty(const Json& j, const char* field) {
  if (!j.contains(field) || j[field].is_null()) return {};
  if (!j[field].is_string()) throw ParseError(std::string("field '") + field + "' must be a string");
  return j[field].get<std::string>();
}

Json read_json(const std::filesystem::path& p) {
  try {
    return Json::parse(read_file(p));
  } catch (const Json::parse_error& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
}

// Numeric stems of `<n><suffix>` files, ascending.
std::vector<int> numbered(const std::filesystem::path& dir, const std::string& suffix) {
  std::vector<int> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    std::string name = e.path().filename().string();
    if (name.size() <= suffix.size() || !name.ends_with(suffix)) continue;
    std::string stem = name.substr(0, name.size() - suffix.size());
    if (!std::all_of(stem.begin(), stem.end(), [](unsigned char c) { return std::isdigit(c); }))
      continue;
    out.push_back(std::stoi(stem));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

IssueRecord issue_from_service(const std::string& repo, const Json& issue,
                               const Json& comments) {
  IssueRecord r;
  r.repo = repo;
  r.number = static_cast<int>(require_int(issue, "number"));
  r.title = string_or_empty(issue, "title");
  r.body = string_or_empty(issue, "body");
  if (issue.contains("labels"))
    for (const auto& l : issue["labels"])
      r.labels.push_back(l.is_string() ? l.get<std::string>() : string_or_empty(l, "name"));
  if (comments.is_array())
    for (const auto& c : comments)
      r.comments.push_back(
          {c.contains("user") ? string_or_empty(c["user"], "login") : std::string(),
           string_or_empty(c, "body")});
  return r;
}

PullRequestRecord pr_from_service(const std::string& repo, const Json& pull, std::string diff,
                                  const Json& files) {
  PullRequestRecord r;
  r.repo = repo;
  r.number = static_cast<int>(require_int(pull, "number"));
  r.title = string_or_empty(pull, "title");
  r.description = string_or_empty(pull, "body");
  r.diff_text = std::move(diff);
  if (files.is_array())
    for (const auto& f : files) r.changed_files.push_back(require_string(f, "filename"));
  return r;
}

Page FixtureFetcher::fetch_page(const std::string& repo, int cursor) {
  Page page;
  if (cursor != 1) return page;
  if (!std::filesystem::is_directory(dir_))
    throw Error("fixture directory " + dir_.string() + " does not exist");
  const auto issues = dir_ / "issues";
  for (int n : numbered(issues, ".json")) {
    auto comments_path = issues / (std::to_string(n) + ".comments.json");
    Json comments = std::filesystem::exists(comments_path) ? read_json(comments_path) : Json::array();
    page.issues.push_back(
        issue_from_service(repo, read_json(issues / (std::to_string(n) + ".json")), comments));
  }
  const auto pulls = dir_ / "pulls";
  for (int n : numbered(pulls, ".json")) {
    auto base = pulls / std::to_string(n);
    std::string diff = std::filesystem::exists(base.string() + ".diff")
                           ? read_file(base.string() + ".diff")
                           : std::string();
    Json files = std::filesystem::exists(base.string() + ".files.json")
                     ? read_json(base.string() + ".files.json")
                     : Json::array();
    page.prs.push_back(pr_from_service(repo, read_json(base.string() + ".json"), diff, files));
  }
  return page;
}

Corpus ingest_repo(const std::string& repo, Fetcher& fetcher,
                   const std::filesystem::path& store, int start_cursor) {
  Corpus corpus = Corpus::load(store);
  std::optional<int> cursor = start_cursor;
  while (cursor) {
    Page page = fetcher.fetch_page(repo, *cursor);
    for (auto& i : page.issues) corpus.upsert(std::move(i));
    for (auto& p : page.prs) corpus.upsert(std::move(p));
    corpus.relink();
    corpus.save(store);
    cursor = page.next_cursor;
  }
  return corpus;
}

}  // namespace pfuzz::corpus
