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

#include "pfuzz/llm/types.hpp"

#include "pfuzz/common/error.hpp"

namespace pfuzz::llm {

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::kPatternExtraction: return "pattern_extraction";
    case TemplateId::kApiDescription: return "api_description";
    case TemplateId::kBugTransfer: return "bug_transfer";
    case TemplateId::kIssueApiRelevance: return "issue_api_relevance";
    case TemplateId::kIssueDemo: return "issue_demo";
    case TemplateId::kIssueFeedback: return "issue_feedback";
    case TemplateId::kIssueComplexity: return "issue_complexity";
    case TemplateId::kSameBugType: return "same_bug_type";
    case TemplateId::kRealMismatch: return "real_mismatch";
    case TemplateId::kSameBugPattern: return "same_bug_pattern";
    case TemplateId::kBugFreeVerification: return "bug_free_verification";
    case TemplateId::kCriteriaExtraction: return "criteria_extraction";
    case TemplateId::kRealBug: return "real_bug";
    case TemplateId::kDebateChallenge: return "debate_challenge";
    case TemplateId::kDebateSummary: return "debate_summary";
    case TemplateId::kFormatRepair: return "format_repair";
    case TemplateId::kEmbedding: return "embedding";
  }
  return "unknown";
}

TemplateId template_from_string(std::string_view name) {
  for (TemplateId id : kAllTemplates)
    if (to_string(id) == name) return id;
  throw ParseError("unknown template id '" + std::string(name) + "'");
}

std::string_view default_component(TemplateId id) {
  switch (id) {
    case TemplateId::kPatternExtraction:
      return component::kPatternExtraction;
    case TemplateId::kApiDescription:
    case TemplateId::kEmbedding:
      return component::kApiMatching;
    case TemplateId::kBugTransfer:
      return component::kBugTransfer;
    case TemplateId::kFormatRepair:
      // Repairs are billed to whoever asked; callers set `component`.
      return component::kSelfValidation;
    default:
      return component::kSelfValidation;
  }
}

bool is_validation_template(TemplateId id) {
  return default_component(id) == component::kSelfValidation &&
         id != TemplateId::kFormatRepair;
}

void LlmRequest::validate() const {
  if (rendered_prompt.empty()) throw InvariantError("rendered_prompt is empty");
  if (temperature && (*temperature < 0.0 || *temperature > 2.0))
    throw InvariantError("temperature must lie in [0, 2]");
  if (max_tokens <= 0) throw InvariantError("max_tokens must be positive");
}

}  // namespace pfuzz::llm
