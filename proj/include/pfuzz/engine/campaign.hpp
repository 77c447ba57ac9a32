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

#ifndef PFUZZ_ENGINE_CAMPAIGN_HPP_
#define PFUZZ_ENGINE_CAMPAIGN_HPP_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfuzz/common/jsonl.hpp"
#include "pfuzz/common/money.hpp"
#include "pfuzz/corpus/records.hpp"
#include "pfuzz/engine/transfer.hpp"
#include "pfuzz/harness/harness.hpp"
#include "pfuzz/llm/gateway.hpp"
#include "pfuzz/matcher/api_matcher.hpp"
#include "pfuzz/pattern/pattern.hpp"
#include "pfuzz/validator/validator.hpp"

namespace pfuzz::engine {

struct CampaignConfig {
  std::size_t window_size = 10;
  std::size_t queue_depth = matcher::kDefaultQueueDepth;
  std::size_t expansion_count = 10;
  int repeats = validator::kDefaultRepeats;
  double timeout_seconds = 30;
  std::size_t max_tests_per_pattern = 200;
  std::optional<Money> budget;  // spend cap for this campaign
  int parallelism = 1;

  // Throws InvariantError.
  void validate() const;
  Json to_json() const;
  static CampaignConfig from_json(const Json& j);
  friend bool operator==(const CampaignConfig&, const CampaignConfig&) = default;
};

enum class TestOutcome {
  kNoBug,             // oracle silent
  kGenerationFailed,  // no usable program after re-asks
  kRejected,          // oracle fired, validation filtered it
  kIncomplete,        // oracle fired, validation could not finish
  kFinding,
};

std::string_view to_string(TestOutcome o);
TestOutcome test_outcome_from_string(std::string_view s);

struct TestRecord {
  int round = 0;
  std::string target_api;
  TestOutcome outcome = TestOutcome::kNoBug;
  std::string detail;  // generation error, verdict reason
  std::optional<TransferredTest> test;
  std::optional<harness::ExecutionResult> execution;
  std::optional<validator::ValidationVerdict> verdict;

  Json to_json() const;
};

struct Finding {
  corpus::IssueRef source_issue;
  std::string source_api;
  std::string target_api;
  pattern::BugCategory bug_category = pattern::BugCategory::kWrongOutputs;
  std::string oracle_kind;
  std::string program_source;
  std::string verdict_id;     // candidate id in verdicts.jsonl
  std::string trace_digest;   // sha256 of the formatted trace
  int round = 0;

  Json to_json() const;
  static Finding from_json(const Json& j);
  friend bool operator==(const Finding&, const Finding&) = default;
};

struct CampaignState {
  pattern::BugPattern pattern;
  matcher::SimilarApiQueue api_queue;  // anchor excluded
  std::vector<std::string> tested;     // in test order: the campaign trace
  std::vector<std::string> found_new_bug_api;
  std::vector<std::string> pending;    // current batch, not yet tested
  std::vector<Finding> findings;
  int round = 0;
  bool init = true;
  std::size_t tests_generated = 0;
  std::string halt_reason;  // empty while the campaign can continue

  bool is_tested(const std::string& api) const;
  // Throws InvariantError when the state breaks its invariants.
  void check() const;
  friend bool operator==(const CampaignState&, const CampaignState&) = default;
};

namespace halt {
inline constexpr std::string_view kNoNewBugs = "no_new_bugs";
inline constexpr std::string_view kQueueExhausted = "queue_exhausted";
inline constexpr std::string_view kMaxTests = "max_tests";
inline constexpr std::string_view kBudget = "budget";
inline constexpr std::string_view kAnchorNotEmbedded = "anchor_not_embedded";
}  // namespace halt

/// Round selection: the top `window_size` untested queue entries, then up to
/// `expansion_count` nearest neighbours of each API in found_new_bug_api
/// (which is drained). Tested APIs, the anchor and repeats are dropped.
std::vector<std::string> next_batch(CampaignState& state, const CampaignConfig& config,
                                    const matcher::ApiMatcher& matcher);

/// Recording one result. The target always joins `tested`; it joins the found
/// set and yields a finding only if the oracle fired and the verdict passed.
void record_finding(CampaignState& state, const TransferredTest& test,
                    const harness::ExecutionResult& execution,
                    const validator::ValidationVerdict& verdict);

inline constexpr std::string_view kSnapshotVersion = "patternfuzz-campaign/1";

struct CampaignSnapshot {
  CampaignConfig config;
  CampaignState state;
  std::string cassette;  // path of the cassette the run used, may be empty

  Json to_json() const;
  // Throws InvariantError on a version mismatch.
  static CampaignSnapshot from_json(const Json& j);
  void save(const std::filesystem::path& path) const;
  static CampaignSnapshot load(const std::filesystem::path& path);
};

struct CampaignContext {
  const corpus::IssueRecord& issue;  // where the pattern came from
  const matcher::ApiMatcher& matcher;
  llm::Gateway& gateway;
  harness::Harness& harness;
  validator::CandidateValidator& validator;
};

/// One fuzzing campaign for one pattern. With a directory, every round ends
/// with snapshot.json and per-test artifacts under tests/.
class Campaign {
 public:
  Campaign(CampaignContext context, pattern::BugPattern pattern, CampaignConfig config,
           std::filesystem::path dir = {}, std::string cassette_ref = {});

  /// Continues from `dir`/snapshot.json. Throws InvariantError when the
  /// snapshot is for another pattern or an incompatible version.
  static Campaign resume(CampaignContext context, const pattern::BugPattern& pattern,
                         const std::filesystem::path& dir);

  /// Runs rounds until a halt condition or `max_rounds` more rounds.
  /// HarnessError propagates after the state is saved.
  void run(std::optional<int> max_rounds = std::nullopt);

  bool halted() const { return !state_.halt_reason.empty(); }
  const CampaignState& state() const { return state_; }
  const CampaignConfig& config() const { return config_; }
  const std::vector<TestRecord>& records() const { return records_; }

  std::function<void(const TestRecord&)> on_test;

 private:
  TestRecord run_one(const std::string& target, int round);
  void write_artifacts(const TestRecord& record, std::size_t index) const;
  void save() const;

  CampaignContext ctx_;
  CampaignConfig config_;
  CampaignState state_;
  std::filesystem::path dir_;
  std::string cassette_ref_;
  std::vector<TestRecord> records_;  // this process only
  Money spent_at_start_;
};

}  // namespace pfuzz::engine

#endif  // PFUZZ_ENGINE_CAMPAIGN_HPP_
