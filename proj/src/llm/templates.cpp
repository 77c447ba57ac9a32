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

#include "pfuzz/llm/templates.hpp"

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/text.hpp"

namespace pfuzz::llm {

namespace {

constexpr const char* kPatternExtraction = R"(You are analysing a resolved bug report from {{repo}} together with the pull request that fixed it.

Issue #{{issue_number}}: {{issue_title}}
{{issue_body}}

Discussion:
{{issue_comments}}

Fix PR #{{pr_number}}: {{pr_title}}
{{pr_description}}

Diff:
{{pr_diff}}

Work through these steps:
1. Name the exact public API whose behaviour is wrong (fully qualified).
2. State the conditions that must hold for the bug to appear (inputs, device, mode, environment).
3. Contrast the expected behaviour with the observed behaviour.
4. Describe the check that tells a buggy run from a correct one.
5. Write a self-contained Python program that reproduces the bug and prints the line BUG FOUND when the check fires.
6. Pick exactly one category from: {{categories}}.

Answer with this block and nothing after it:
=== PATTERN ===
@bug_api: <qualified name>
@bug_category: <one category>
@triggering_context: <conditions>
@oracle_design: <the check>
@expected_behavior: <what should happen>
@actual_behavior: <what happens>
@repro_program:
<python source>
=== END ===
)";

constexpr const char* kApiDescription = R"(Describe what the following library function does, independent of any particular use case.

Name: {{qualified_name}}
Module: {{module_path}}
Parameters: {{signature}}
Documentation:
{{doc_text}}

Cover the kinds of inputs it accepts and the core computation it performs, in a short paragraph. Do not mention example applications, tutorials or typical scenarios.

=== DESCRIPTION ===
@description: <paragraph>
=== END ===
)";

constexpr const char* kBugTransfer = R"(A known bug was found in {{bug_api}} (category: {{bug_category}}).
Triggering context: {{triggering_context}}
Oracle: {{oracle_design}}
Expected: {{expected_behavior}}
Actual: {{actual_behavior}}
Reproducer:
{{repro_program}}

Target API: {{target_api}}
Target parameters: {{target_signature}}
Target documentation:
{{target_doc}}

Reason step by step:
1. Compare what the two APIs do and where they are used; note the differences.
2. Assume the target has the analogous bug. Work out the input or environment that would trigger it for the target specifically; the exact trigger values often differ between APIs.
3. Describe the abnormal behaviour you would expect (wrong value, exception, error code, leaked state).
4. Design a check that catches exactly that behaviour and nothing else.
5. Write a complete Python test that sets up the context, calls the target and runs the check. When the check fires the program prints the line {{marker}} on its own.
Choose the oracle kind from: {{oracle_kinds}}.

=== TEST ===
@rationale: <step 1-3 summary>
@adapted_context: <trigger for the target>
@adapted_oracle: <the check>
@oracle_kind: <one oracle kind>
@program:
<python source>
=== END ===
)";

constexpr const char* kIssueApiRelevance = R"(Does the issue below report a defect in a specific library API, as opposed to a build problem, a documentation request, a question or a feature request?

Title: {{issue_title}}
{{issue_body}}

=== VERDICT ===
@passes: <yes|no>
@reasoning: <one paragraph>
=== END ===
)";

constexpr const char* kIssueDemo = R"(Does the issue below contain runnable code that demonstrates the problem?

Title: {{issue_title}}
{{issue_body}}

=== VERDICT ===
@passes: <yes|no>
@reasoning: <one paragraph>
=== END ===
)";

constexpr const char* kIssueFeedback = R"(Read the maintainer discussion of the issue below. Answer yes if no maintainer disputes that the reported behaviour is a bug (for example by calling it expected behaviour or user error); answer no otherwise.

Title: {{issue_title}}
{{issue_body}}

Comments:
{{issue_comments}}

=== VERDICT ===
@passes: <yes|no>
@reasoning: <one paragraph>
=== END ===
)";

constexpr const char* kIssueComplexity = R"(Is the reproduction in the issue below small enough that the bug can be attributed to one API call and reasoned about without the surrounding application?

Title: {{issue_title}}
{{issue_body}}

=== VERDICT ===
@passes: <yes|no>
@reasoning: <one paragraph>
=== END ===
)";

constexpr const char* kSameBugType = R"(Classify two test cases by bug type. Each type is defined by clauses over the program's variables, API calls and oracle checks:

{{ir_catalog}}

Original case:
{{original_program}}
Runtime log:
{{original_trace}}

Transferred case:
{{transferred_program}}
Runtime log:
{{transferred_trace}}

Match each case against the definitions using the runtime log as evidence. Use only these labels: {{bug_types}}.

=== VERDICT ===
@original_type: <label>
@transferred_type: <label>
@same_type: <yes|no>
@reasoning: <which clauses matched>
=== END ===
)";

constexpr const char* kRealMismatch = R"(The program below compares the same computation across two execution environments and reported a difference.

{{program}}

Output:
{{stdout}}
Runtime log:
{{trace}}

Check whether the inputs were identical on both sides (no per-side random generation, no uninitialised memory, same dtype) and whether the difference exceeds what floating-point reordering explains. Answer yes only for a genuine mismatch.

=== VERDICT ===
@real_mismatch: <yes|no>
@reasoning: <one paragraph>
=== END ===
)";

constexpr const char* kSameBugPattern = R"(Original bug in {{bug_api}}:
Trigger: {{triggering_context}}
Oracle: {{oracle_design}}
Program:
{{original_program}}
Runtime log:
{{original_trace}}

Transferred test for {{target_api}}:
Trigger: {{adapted_context}}
Oracle: {{adapted_oracle}}
Program:
{{transferred_program}}
Output:
{{stdout}}
Runtime log:
{{transferred_trace}}

Using the runtime log, determine which check actually fired in the transferred test. Compare the two cases on trigger conditions, runtime behaviour and the oracle that fired. Answer yes only if all three line up.

=== VERDICT ===
@same_pattern: <yes|no>
@reasoning: <one paragraph>
=== END ===
)";

constexpr const char* kBugFreeVerification = R"(Assume {{target_api}} is implemented correctly and has no defect of the kind being tested.

Oracle under test: {{adapted_oracle}}
Program:
{{program}}
Output:
{{stdout}}
Runtime log:
{{trace}}

Under that assumption, would the oracle still fire? Consider the mathematical definition of the API, documented behaviour, and environmental effects. Answer oracle_sound: yes if a correct implementation can never trigger it.

=== VERDICT ===
@oracle_sound: <yes|no>
@reasoning: <one paragraph>
=== END ===
)";

constexpr const char* kCriteriaExtraction = R"(The issue below was confirmed and fixed as a bug in {{bug_api}}.

Title: {{issue_title}}
{{issue_body}}

Comments:
{{issue_comments}}

Explain, from what the API is supposed to do, why the observed behaviour is a bug rather than expected behaviour. State the violated requirement as a criterion that could be applied to another API.

=== CRITERIA ===
@criteria: <criterion>
=== END ===
)";

constexpr const char* kRealBug = R"(Bug determination criterion taken from a confirmed issue:
{{criteria}}

A test for {{target_api}} printed BUG FOUND.
Program:
{{program}}
Output:
{{stdout}}
Runtime log:
{{trace}}

Explain why the check fired. Then apply the criterion: does the behaviour of {{target_api}} violate the requirement, or does the trigger come from test design, the environment, or a semantic difference between the APIs?

=== VERDICT ===
@real_bug: <yes|no>
@reasoning: <one paragraph>
=== END ===
)";

constexpr const char* kDebateChallenge = R"({{previous}}

Please challenge this from the opposing viewpoint.

=== CHALLENGE ===
@challenge: <strongest counter-argument>
=== END ===
)";

constexpr const char* kDebateSummary = R"({{previous}}

Counter-argument:
{{challenge}}

Based on both viewpoints, summarize whether this is a false positive.

=== VERDICT ===
@false_positive: <yes|no>
@reasoning: <one paragraph>
=== END ===
)";

constexpr const char* kFormatRepair = R"({{original_prompt}}

Your previous answer could not be used:
{{error}}

Previous answer:
{{bad_response}}

Reply again using exactly the requested block format.
)";

constexpr const char* kEmbedding = "{{text}}";

}  // namespace

TemplateRegistry::TemplateRegistry() {
  texts_ = {
      {TemplateId::kPatternExtraction, kPatternExtraction},
      {TemplateId::kApiDescription, kApiDescription},
      {TemplateId::kBugTransfer, kBugTransfer},
      {TemplateId::kIssueApiRelevance, kIssueApiRelevance},
      {TemplateId::kIssueDemo, kIssueDemo},
      {TemplateId::kIssueFeedback, kIssueFeedback},
      {TemplateId::kIssueComplexity, kIssueComplexity},
      {TemplateId::kSameBugType, kSameBugType},
      {TemplateId::kRealMismatch, kRealMismatch},
      {TemplateId::kSameBugPattern, kSameBugPattern},
      {TemplateId::kBugFreeVerification, kBugFreeVerification},
      {TemplateId::kCriteriaExtraction, kCriteriaExtraction},
      {TemplateId::kRealBug, kRealBug},
      {TemplateId::kDebateChallenge, kDebateChallenge},
      {TemplateId::kDebateSummary, kDebateSummary},
      {TemplateId::kFormatRepair, kFormatRepair},
      {TemplateId::kEmbedding, kEmbedding},
  };
}

void TemplateRegistry::load_overrides(const std::filesystem::path& dir) {
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    TemplateId id = template_from_string(entry.path().stem().string());
    texts_[id] = read_file(entry.path());
  }
}

const std::string& TemplateRegistry::text(TemplateId id) const {
  return texts_.at(id);
}

std::string TemplateRegistry::render(
    TemplateId id, const std::map<std::string, std::string>& slots) const {
  return render_template(text(id), slots);
}

const TemplateRegistry& default_templates() {
  static const TemplateRegistry registry;
  return registry;
}

}  // namespace pfuzz::llm
