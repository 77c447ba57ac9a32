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

// Stand-ins for the campaign's collaborators: a neighbour table instead of
// embeddings, a harness and validator that answer from sets, and a model
// that writes a trivially valid test for whatever target it is asked about.

#ifndef PFUZZ_TESTS_ENGINE_STUBS_HPP_
#define PFUZZ_TESTS_ENGINE_STUBS_HPP_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "pfuzz/common/error.hpp"
#include "pfuzz/engine/campaign.hpp"

namespace testutil {

using namespace pfuzz;

/// Neighbour lists by name, best first. Scores fall by 0.001 per rank.
class TableMatcher : public matcher::ApiMatcher {
 public:
  std::map<std::string, std::vector<std::string>> neighbours;

  bool has_embedding(const std::string& api) const override { return neighbours.count(api) > 0; }
  matcher::SimilarApiQueue similar(const std::string& api, std::size_t k) const override {
    auto it = neighbours.find(api);
    if (it == neighbours.end()) throw InvariantError("no embedding for " + api);
    matcher::SimilarApiQueue q{api, k, {}};
    for (std::size_t i = 0; i < it->second.size() && i < k; ++i)
      q.entries.push_back({it->second[i], 1.0 - 0.001 * static_cast<double>(i)});
    return q;
  }
  const matcher::ApiRecord* record(const std::string& api) const override {
    std::lock_guard lock(*mu_);
    auto [it, _] = records_.try_emplace(api, matcher::ApiRecord{api, "stub", {}, ""});
    return &it->second;
  }

 private:
  std::shared_ptr<std::mutex> mu_ = std::make_shared<std::mutex>();
  mutable std::map<std::string, matcher::ApiRecord> records_;
};

inline std::string api_name(int rank) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "q%02d", rank);
  return buf;
}

// Pulls the target name out of a transfer prompt.
inline std::string transfer_target(const std::string& prompt) {
  const std::string tag = "Target API: ";
  auto at = prompt.find(tag);
  if (at == std::string::npos) throw std::logic_error("not a transfer prompt");
  auto end = prompt.find('\n', at);
  return prompt.substr(at + tag.size(), end - at - tag.size());
}

// A model whose transfer answer is a one-line test naming the target.
inline std::string transfer_answer(const llm::LlmRequest& r) {
  const std::string target = transfer_target(r.rendered_prompt);
  engine::TransferredTest t;
  t.rationale = "same computation";
  t.adapted_context = "boundary input for " + target;
  t.adapted_oracle = "output differs from the reference";
  t.oracle_kind = "value_conformance";
  t.program_source = "r = " + target + "()\nif r != REF:\n    print('BUG FOUND')";
  return engine::render_transfer_response(t);
}

/// Fires the oracle for every program that calls one of `firing` (all
/// programs when empty); crashes with SIGSEGV for `crashing`.
class SetHarness : public harness::Harness {
 public:
  std::set<std::string> firing;
  bool fire_all = true;
  std::set<std::string> crashing;
  std::vector<std::string> executed;

  std::vector<Json> catalog(const std::string&) override { return {}; }
  std::string instrument(const std::string& program) override { return program; }
  harness::ExecutionResult execute(const std::string& program, double) override {
    std::string target = program.substr(4, program.find('(') - 4);
    {
      std::lock_guard lock(mu_);
      executed.push_back(target);
    }
    harness::ExecutionResult r;
    if (crashing.count(target)) {
      r.status = harness::ExecStatus::kCrash;
      r.exit_code = -11;
      r.signal_name = "SIGSEGV";
    } else if (fire_all || firing.count(target)) {
      r.stdout_text = "BUG FOUND\n";
    }
    r.normalize();
    return r;
  }

 private:
  std::mutex mu_;
};

/// Passes exactly the candidates `accept` likes and counts calls.
class StubValidator : public validator::CandidateValidator {
 public:
  explicit StubValidator(std::function<bool(const std::string&)> accept)
      : accept_(std::move(accept)) {}

  validator::ValidationVerdict validate(const validator::Candidate& c) override {
    {
      std::lock_guard lock(mu_);
      ++calls;
    }
    validator::ValidationVerdict v;
    v.candidate_id = validator::candidate_id(c);
    v.final = accept_(c.test.target_api);
    v.stages.push_back({"stub", {{0, v.final, {}}}, v.final, true, ""});
    if (!v.final) v.failure_stage = "stub";
    v.reason = v.final ? "accepted" : "rejected";
    return v;
  }
  int calls = 0;

 private:
  std::function<bool(const std::string&)> accept_;
  std::mutex mu_;
};

inline pattern::BugPattern anchor_pattern(const std::string& anchor = "anchor") {
  pattern::BugPattern p;
  p.source_issue = {"stub/lib", 1};
  p.bug_api = anchor;
  p.bug_category = pattern::BugCategory::kWrongOutputs;
  p.triggering_context = "boundary input";
  p.oracle_design = "compare with reference";
  p.expected_behavior = "reference value";
  p.actual_behavior = "other value";
  p.repro_program = "r = anchor()\nif r != REF:\n    print('BUG FOUND')";
  return p;
}

inline corpus::IssueRecord anchor_issue() {
  corpus::IssueRecord i;
  i.repo = "stub/lib";
  i.number = 1;
  i.title = "anchor returns the wrong value";
  i.body = "r = anchor()";
  return i;
}

/// The 25-entry queue of the scripted scenario: the anchor's neighbours are
/// q01..q25; q03's own neighbours are x01..x10 (plus itself and the anchor).
inline TableMatcher scripted_matcher(int queue = 25) {
  TableMatcher m;
  std::vector<std::string> q{"anchor"};
  for (int i = 1; i <= queue; ++i) q.push_back(api_name(i));
  m.neighbours["anchor"] = q;
  std::vector<std::string> x{"q03", "anchor"};
  for (int i = 1; i <= 10; ++i) x.push_back("x" + api_name(i).substr(1));
  m.neighbours["q03"] = x;
  return m;
}

}  // namespace testutil

#endif  // PFUZZ_TESTS_ENGINE_STUBS_HPP_
