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

#ifndef PFUZZ_VALIDATOR_VALIDATOR_HPP_
#define PFUZZ_VALIDATOR_VALIDATOR_HPP_

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfuzz/common/jsonl.hpp"
#include "pfuzz/corpus/records.hpp"
#include "pfuzz/engine/transfer.hpp"
#include "pfuzz/harness/harness.hpp"
#include "pfuzz/llm/gateway.hpp"
#include "pfuzz/pattern/pattern.hpp"
#include "pfuzz/validator/ir.hpp"

namespace pfuzz::validator {

inline constexpr int kDefaultRepeats = 3;

/// A candidate passes a stage only if every epoch says so. Throws
/// InvariantError unless there is exactly one result per repeat.
bool vote(const std::vector<bool>& epoch_results, int repeats = kDefaultRepeats);

namespace stage {
inline constexpr std::string_view kSameBugType = "same_bug_type";
inline constexpr std::string_view kRealMismatch = "real_mismatch";
inline constexpr std::string_view kSameBugPattern = "same_bug_pattern";
inline constexpr std::string_view kOracleCorrectness = "oracle_correctness";
inline constexpr std::string_view kIssueSuitability = "issue_suitability";
inline constexpr std::string_view kCriteriaJudgment = "criteria_judgment";
}  // namespace stage

inline constexpr std::string_view kUnverifiableReason = "unverifiable — criteria unavailable";

// One prompt/answer of an epoch, kept by hash for audit.
struct Exchange {
  std::string template_id;
  std::string response_sha256;
  friend bool operator==(const Exchange&, const Exchange&) = default;
};

struct EpochRecord {
  int epoch = 0;
  bool result = false;
  std::vector<Exchange> exchanges;
  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct StageResult {
  std::string stage;
  std::vector<EpochRecord> epochs;
  bool passed = false;
  bool deterministic = false;  // decided by match_ir, no model involved
  std::string note;

  std::vector<bool> results() const;
  friend bool operator==(const StageResult&, const StageResult&) = default;
};

struct ValidationVerdict {
  std::string candidate_id;  // "<repo>#<n> -> <target api>"
  std::vector<StageResult> stages;
  bool final = false;
  std::optional<std::string> failure_stage;
  std::string reason;
  bool incomplete = false;  // the gateway failed mid-pipeline
  std::optional<IrBugType> original_type;
  std::optional<IrBugType> transferred_type;

  const StageResult* stage(std::string_view name) const;
  Json to_json() const;
  static ValidationVerdict from_json(const Json& j);
  friend bool operator==(const ValidationVerdict&, const ValidationVerdict&) = default;
};

struct Suitability {
  bool api_level_relevance = false;
  bool has_demo = false;
  bool developer_negative_feedback_absent = false;
  bool complexity_acceptable = false;

  bool all() const {
    return api_level_relevance && has_demo && developer_negative_feedback_absent &&
           complexity_acceptable;
  }
  friend bool operator==(const Suitability&, const Suitability&) = default;
};

struct BugCriteria {
  corpus::IssueRef issue_ref;
  Suitability suitability;
  std::string criteria_text;  // empty unless suitability.all()
};

struct Candidate {
  const corpus::IssueRecord& issue;
  const pattern::BugPattern& pattern;
  const engine::TransferredTest& test;
  const harness::ExecutionResult& execution;
};

std::string candidate_id(const Candidate& c);

// What the fuzzing loop needs from a validator; tests substitute stubs.
class CandidateValidator {
 public:
  virtual ~CandidateValidator() = default;
  virtual ValidationVerdict validate(const Candidate& candidate) = 0;
};

struct ValidatorOptions {
  int repeats = kDefaultRepeats;
};

/// The model-backed pipeline: symptom similarity (bug type, then mismatch or
/// pattern comparison), reverse-hypothesis oracle check, and criteria-based
/// judgment with a debate. Every stage is voted over `repeats` epochs and the
/// first failing stage ends the run.
class Validator : public CandidateValidator {
 public:
  explicit Validator(llm::Gateway& gateway, ValidatorOptions options = {});

  /// Throws BudgetExceededError; any other gateway failure yields an
  /// incomplete verdict.
  ValidationVerdict validate(const Candidate& candidate) override;

  // Per-issue, cached. The stage record is what produced the flags.
  std::pair<Suitability, StageResult> assess_issue_suitability(const corpus::IssueRecord& issue);
  // Empty when the model gives nothing usable. Cached.
  std::string extract_criteria(const corpus::IssueRecord& issue, const std::string& bug_api);

 private:
  llm::Gateway& gateway_;
  ValidatorOptions options_;
  std::mutex mu_;
  std::map<std::string, std::pair<Suitability, StageResult>> suitability_cache_;
  std::map<std::string, std::string> criteria_cache_;
};

void append_verdict(const std::filesystem::path& path, const ValidationVerdict& verdict);
std::vector<ValidationVerdict> load_verdicts(const std::filesystem::path& path);

}  // namespace pfuzz::validator

#endif  // PFUZZ_VALIDATOR_VALIDATOR_HPP_
