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

#include "pfuzz/common/error.hpp"
#include "pfuzz/corpus/fetcher.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace pfuzz::corpus {

namespace {

class Session {
 public:
  Session(const GithubOptions& o, int cursor) : client_(o.base_url), cursor_(cursor) {
    client_.set_read_timeout(o.timeout_seconds, 0);
    client_.set_follow_location(true);
    httplib::Headers headers{{"User-Agent", "patternfuzz"},
                             {"X-GitHub-Api-Version", "2022-11-28"}};
    if (!o.token.empty()) headers.emplace("Authorization", "Bearer " + o.token);
    client_.set_default_headers(headers);
  }

  std::string get(const std::string& path, const std::string& accept) {
    auto res = client_.Get(path, httplib::Headers{{"Accept", accept}});
    if (!res) throw Error("GET " + path + ": " + httplib::to_string(res.error()));
    if (res->status == 429 ||
        (res->status == 403 && res->get_header_value("X-RateLimit-Remaining") == "0"))
      throw RateLimitedError("rate limited on " + path, cursor_);
    if (res->status == 401 || res->status == 403)
      throw Error("GET " + path + ": authentication failed (HTTP " +
                  std::to_string(res->status) + ")");
    if (res->status != 200)
      throw Error("GET " + path + ": HTTP " + std::to_string(res->status));
    return res->body;
  }

  Json get_json(const std::string& path) {
    std::string body = get(path, "application/vnd.github+json");
    try {
      return Json::parse(body);
    } catch (const Json::parse_error& e) {
      throw ParseError("GET " + path + ": " + e.what());
    }
  }

 private:
  httplib::Client client_;
  int cursor_;
};

}  // namespace

Page GithubFetcher::fetch_page(const std::string& repo, int cursor) {
  Session s(options_, cursor);
  const std::string base = "/repos/" + repo;
  Json listing = s.get_json(base + "/issues?state=closed&sort=created&direction=asc&per_page=" +
                            std::to_string(options_.per_page) + "&page=" +
                            std::to_string(cursor));
  if (!listing.is_array()) throw ParseError("issue listing is not an array");

  Page page;
  for (const auto& item : listing) {
    const std::string n = std::to_string(require_int(item, "number"));
    if (item.contains("pull_request")) {
      Json pull = s.get_json(base + "/pulls/" + n);
      std::string diff = s.get(base + "/pulls/" + n, "application/vnd.github.diff");
      Json files = s.get_json(base + "/pulls/" + n + "/files?per_page=100");
      page.prs.push_back(pr_from_service(repo, pull, std::move(diff), files));
    } else {
      Json comments = s.get_json(base + "/issues/" + n + "/comments?per_page=100");
      page.issues.push_back(issue_from_service(repo, item, comments));
    }
  }
  if (static_cast<int>(listing.size()) == options_.per_page) page.next_cursor = cursor + 1;
  return page;
}

}  // namespace pfuzz::corpus
