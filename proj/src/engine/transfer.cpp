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

#include "pfuzz/engine/transfer.hpp"

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/field_block.hpp"
#include "pfuzz/common/text.hpp"
#include "pfuzz/harness/harness.hpp"
#include "pfuzz/llm/structured.hpp"

namespace pfuzz::engine {

std::string normalize_oracle_kind(std::string_view kind) {
  std::string k = to_lower(trim(kind));
  for (auto known : kOracleKinds)
    if (k == known) return k;
  throw ParseError("unknown oracle kind '" + std::string(kind) + "'");
}

void TransferredTest::validate() const {
  if (target_api.empty()) throw InvariantError("transferred test without a target");
  if (trim(program_source).empty())
    throw InvariantError("transferred test for " + target_api + " has no program");
}

Json TransferredTest::to_json() const {
  return {{"source_issue", {{"repo", source_issue.repo}, {"number", source_issue.number}}},
          {"source_api", source_api},
          {"target_api", target_api},
          {"program_source", program_source},
          {"adapted_context", adapted_context},
          {"adapted_oracle", adapted_oracle},
          {"oracle_kind", oracle_kind},
          {"rationale", rationale}};
}

TransferredTest TransferredTest::from_json(const Json& j) {
  TransferredTest t;
  const Json& src = require_field(j, "source_issue");
  t.source_issue = {require_string(src, "repo"), static_cast<int>(require_int(src, "number"))};
  t.source_api = require_string(j, "source_api");
  t.target_api = require_string(j, "target_api");
  t.program_source = require_string(j, "program_source");
  t.adapted_context = j.value("adapted_context", "");
  t.adapted_oracle = j.value("adapted_oracle", "");
  t.oracle_kind = j.value("oracle_kind", "");
  t.rationale = j.value("rationale", "");
  t.validate();
  return t;
}

TransferredTest parse_transfer_response(std::string_view text, const pattern::BugPattern& pattern,
                                        const std::string& target_api) {
  FieldBlock b = FieldBlock::parse(text, "TEST");
  TransferredTest t;
  t.source_issue = pattern.source_issue;
  t.source_api = pattern.bug_api;
  t.target_api = target_api;
  t.rationale = b.require("rationale");
  t.adapted_context = b.require("adapted_context");
  t.adapted_oracle = b.require("adapted_oracle");
  t.oracle_kind = normalize_oracle_kind(b.require("oracle_kind"));
  t.program_source = b.require("program");
  if (t.program_source.find(harness::kBugFoundMarker) == std::string::npos)
    throw ParseError("program never prints " + std::string(harness::kBugFoundMarker));
  if (!delimiters_balanced(t.program_source))
    throw ParseError("program has unbalanced brackets or quotes");
  return t;
}

std::string render_transfer_response(const TransferredTest& t) {
  return FieldBlock::render("TEST", {{"rationale", t.rationale},
                                     {"adapted_context", t.adapted_context},
                                     {"adapted_oracle", t.adapted_oracle},
                                     {"oracle_kind", t.oracle_kind},
                                     {"program", t.program_source}});
}

TransferredTest transfer_bug(const pattern::BugPattern& pattern, const matcher::ApiRecord& target,
                             llm::Gateway& gateway) {
  if (target.qualified_name == pattern.bug_api)
    throw InvariantError("cannot transfer a bug onto its own API " + target.qualified_name);
  std::string kinds;
  for (auto k : kOracleKinds) {
    if (!kinds.empty()) kinds += ", ";
    kinds += k;
  }
  auto request = gateway.make_request(
      llm::TemplateId::kBugTransfer,
      {{"bug_api", pattern.bug_api},
       {"bug_category", std::string(pattern::to_string(pattern.bug_category))},
       {"triggering_context", pattern.triggering_context},
       {"oracle_design", pattern.oracle_design},
       {"expected_behavior", pattern.expected_behavior},
       {"actual_behavior", pattern.actual_behavior},
       {"repro_program", pattern.repro_program},
       {"target_api", target.qualified_name},
       {"target_signature", target.signature()},
       {"target_doc", target.doc_text.empty() ? std::string("(none)") : target.doc_text},
       {"marker", std::string(harness::kBugFoundMarker)},
       {"oracle_kinds", kinds}});
  return llm::ask_parsed(gateway, request, [&](const std::string& text) {
           return parse_transfer_response(text, pattern, target.qualified_name);
         }).value;
}

}  // namespace pfuzz::engine
