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

#ifndef PFUZZ_CORPUS_RECORDS_HPP_
#define PFUZZ_CORPUS_RECORDS_HPP_

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pfuzz/common/jsonl.hpp"

namespace pfuzz::corpus {

// (repo, number), e.g. ("pytorch/pytorch", 132303).
struct IssueRef {
  std::string repo;
  int number = 0;

  std::string str() const { return repo + "#" + std::to_string(number); }
  friend auto operator<=>(const IssueRef&, const IssueRef&) = default;
};

struct Comment {
  std::string author;
  std::string text;
  friend bool operator==(const Comment&, const Comment&) = default;
};

struct IssueRecord {
  std::string repo;
  int number = 0;
  std::string title;
  std::string body;
  std::vector<std::string> labels;
  std::vector<Comment> comments;
  std::vector<int> linked_pr_numbers;  // sorted, unique

  IssueRef ref() const { return {repo, number}; }
  void validate() const;
  Json to_json() const;
  static IssueRecord from_json(const Json& j);
  friend bool operator==(const IssueRecord&, const IssueRecord&) = default;
};

struct PullRequestRecord {
  std::string repo;
  int number = 0;
  std::string title;
  std::string description;
  std::string diff_text;
  std::vector<std::string> changed_files;

  IssueRef ref() const { return {repo, number}; }
  void validate() const;
  Json to_json() const;
  static PullRequestRecord from_json(const Json& j);
  friend bool operator==(const PullRequestRecord&, const PullRequestRecord&) = default;
};

/// Issues and pull requests keyed by (repo, number).
///
/// Stored as `issues.jsonl` and `prs.jsonl` under one directory, one record
/// per line in key order.
class Corpus {
 public:
  // Insert or replace by key.
  void upsert(IssueRecord issue);
  void upsert(PullRequestRecord pr);

  const std::map<IssueRef, IssueRecord>& issues() const { return issues_; }
  const std::map<IssueRef, PullRequestRecord>& prs() const { return prs_; }
  const IssueRecord* find_issue(const IssueRef& ref) const;
  const PullRequestRecord* find_pr(const IssueRef& ref) const;

  /// Recomputes every issue's linked_pr_numbers from the text of both sides.
  void relink();

  void save(const std::filesystem::path& dir) const;
  /// Missing files read as empty. Throws ParseError on a malformed line and
  /// InvariantError naming the key of a repeated record.
  static Corpus load(const std::filesystem::path& dir);

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  std::map<IssueRef, IssueRecord> issues_;
  std::map<IssueRef, PullRequestRecord> prs_;
};

// PR numbers an issue's title, body and comments point at through a fix
// keyword ("fixed by #7") or a pull URL of the same repository.
std::vector<int> fix_links_in_issue(const std::string& repo, const std::string& text);
// Every bare "#N" mention.
std::vector<int> hash_mentions(const std::string& text);
// Issue numbers a PR description closes ("Fixes #12", issue URLs).
std::vector<int> closing_refs_in_pr(const std::string& repo, const std::string& text);

/// Issues with at least one linked PR present in the corpus, each paired
/// with the highest-numbered such PR. Ordered by issue key.
std::vector<std::pair<IssueRecord, PullRequestRecord>> select_fixed_issues(
    const Corpus& corpus);

}  // namespace pfuzz::corpus

#endif  // PFUZZ_CORPUS_RECORDS_HPP_
