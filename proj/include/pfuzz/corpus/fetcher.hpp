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

#ifndef PFUZZ_CORPUS_FETCHER_HPP_
#define PFUZZ_CORPUS_FETCHER_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pfuzz/corpus/records.hpp"

namespace pfuzz::corpus {

struct Page {
  std::vector<IssueRecord> issues;
  std::vector<PullRequestRecord> prs;
  std::optional<int> next_cursor;  // empty on the last page
};

class Fetcher {
 public:
  virtual ~Fetcher() = default;
  // Cursors start at 1. Throws RateLimitedError carrying `cursor`.
  virtual Page fetch_page(const std::string& repo, int cursor) = 0;
};

/// Reads the service's JSON shapes from a directory:
///
///   issues/<n>.json            issue object (title, body, labels, user)
///   issues/<n>.comments.json   optional array of comment objects
///   pulls/<n>.json             pull object (title, body)
///   pulls/<n>.diff             optional unified diff
///   pulls/<n>.files.json       optional array of {filename}
///
/// Everything arrives as a single page.
class FixtureFetcher : public Fetcher {
 public:
  explicit FixtureFetcher(std::filesystem::path dir) : dir_(std::move(dir)) {}
  Page fetch_page(const std::string& repo, int cursor) override;

 private:
  std::filesystem::path dir_;
};

struct GithubOptions {
  std::string base_url = "https://api.github.com";
  std::string token;  // may be empty for anonymous reads
  int per_page = 50;
  int timeout_seconds = 60;
};

/// Minimal REST client: closed issues page by page, plus each pull's
/// metadata, diff and file list.
class GithubFetcher : public Fetcher {
 public:
  explicit GithubFetcher(GithubOptions options) : options_(std::move(options)) {}
  Page fetch_page(const std::string& repo, int cursor) override;

 private:
  GithubOptions options_;
};

// Shared by both fetchers.
IssueRecord issue_from_service(const std::string& repo, const Json& issue,
                               const Json& comments);
PullRequestRecord pr_from_service(const std::string& repo, const Json& pull,
                                  std::string diff, const Json& files);

/// Fetches every page starting at `start_cursor`, merging into the corpus
/// stored at `store`, which is saved after each page. Re-running on the
/// same source leaves the store unchanged.
Corpus ingest_repo(const std::string& repo, Fetcher& fetcher,
                   const std::filesystem::path& store, int start_cursor = 1);

}  // namespace pfuzz::corpus

#endif  // PFUZZ_CORPUS_FETCHER_HPP_
