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

#ifndef PFUZZ_LLM_TYPES_HPP_
#define PFUZZ_LLM_TYPES_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "pfuzz/common/money.hpp"

namespace pfuzz::llm {

/// Every prompt the pipeline sends has one of these identities. The id takes
/// part in the cassette key, so renaming one invalidates recorded cassettes.
enum class TemplateId {
  kPatternExtraction,
  kApiDescription,
  kBugTransfer,
  kIssueApiRelevance,
  kIssueDemo,
  kIssueFeedback,
  kIssueComplexity,
  kSameBugType,
  kRealMismatch,
  kSameBugPattern,
  kBugFreeVerification,
  kCriteriaExtraction,
  kRealBug,
  kDebateChallenge,
  kDebateSummary,
  kFormatRepair,
  kEmbedding,
};

inline constexpr TemplateId kAllTemplates[] = {
    TemplateId::kPatternExtraction, TemplateId::kApiDescription,
    TemplateId::kBugTransfer,       TemplateId::kIssueApiRelevance,
    TemplateId::kIssueDemo,         TemplateId::kIssueFeedback,
    TemplateId::kIssueComplexity,   TemplateId::kSameBugType,
    TemplateId::kRealMismatch,      TemplateId::kSameBugPattern,
    TemplateId::kBugFreeVerification, TemplateId::kCriteriaExtraction,
    TemplateId::kRealBug,           TemplateId::kDebateChallenge,
    TemplateId::kDebateSummary,     TemplateId::kFormatRepair,
    TemplateId::kEmbedding,
};

std::string_view to_string(TemplateId id);
// Throws ParseError for names that are not registered template slots.
TemplateId template_from_string(std::string_view name);

// Cost-accounting buckets.
namespace component {
inline constexpr std::string_view kPatternExtraction = "bug_pattern_extraction";
inline constexpr std::string_view kApiMatching = "api_matching";
inline constexpr std::string_view kBugTransfer = "bug_transfer";
inline constexpr std::string_view kSelfValidation = "self_validation";
}  // namespace component

std::string_view default_component(TemplateId id);
// Validation prompts run at temperature 0.
bool is_validation_template(TemplateId id);

enum class Mode { kLive, kRecord, kReplay };

struct LlmRequest {
  TemplateId template_id = TemplateId::kPatternExtraction;
  std::string rendered_prompt;
  std::string model_id;
  std::optional<double> temperature;  // nullopt: provider default
  int max_tokens = 4096;
  std::string component;  // ledger bucket; empty means default_component()

  // Throws InvariantError when the request breaks its invariants.
  void validate() const;
};

struct LlmResponse {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  Money cost;
};

struct EmbeddingVector {
  Eigen::VectorXd values;
  std::string model_id;

  Eigen::Index dim() const { return values.size(); }
};

}  // namespace pfuzz::llm

#endif  // PFUZZ_LLM_TYPES_HPP_
