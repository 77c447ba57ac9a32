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

#include <doctest.h>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/text.hpp"
#include "pfuzz/validator/ir.hpp"
#include "pfuzz/validator/validator.hpp"
#include "test_util.hpp"
#include "validation_scenarios.hpp"

using namespace pfuzz;
using namespace pfuzz::validator;

namespace {

struct IrCase {
  std::string name;
  IrBugType type;
  bool expected;
  std::vector<TraceFact> facts;
};

std::vector<IrCase> ir_cases() {
  auto doc = Json::parse(read_file(testutil::fixture("ir/facts.json")));
  std::vector<IrCase> out;
  for (const auto& c : doc.at("cases")) {
    IrCase ic{c.at("name").get<std::string>(),
              ir_type_from_string(c.at("bug_type").get<std::string>()),
              c.at("expected").get<bool>(),
              {}};
    for (const auto& f : c.at("facts")) ic.facts.push_back(TraceFact::from_json(f));
    out.push_back(std::move(ic));
  }
  return out;
}

const std::vector<testutil::Scenario>& scenarios() {
  static const auto all = testutil::load_scenarios(testutil::fixture("validation/scenarios.json"));
  return all;
}

const testutil::Scenario& scenario(const std::string& name) {
  for (const auto& s : scenarios())
    if (s.name == name) return s;
  throw std::logic_error("no scenario " + name);
}

llm::Gateway replay_gateway(std::shared_ptr<llm::Cassette> cassette) {
  llm::GatewayOptions o;
  o.mode = llm::Mode::kReplay;
  return llm::Gateway(o, std::move(cassette));
}

}  // namespace

TEST_CASE("vote is the conjunction of exactly `repeats` epochs") {
  int trues = 0;
  for (int mask = 0; mask < 8; ++mask) {
    std::vector<bool> triple = {bool(mask & 1), bool(mask & 2), bool(mask & 4)};
    bool r = vote(triple);
    CHECK(r == (triple[0] && triple[1] && triple[2]));
    trues += r;
  }
  CHECK(trues == 1);
  CHECK(vote({true, false, true}) == false);
  CHECK_THROWS_AS(vote({true, true}), InvariantError);
  CHECK(vote({true}, 1));
  CHECK_THROWS_AS(vote({}, 0), InvariantError);
}

TEST_CASE("bug type labels") {
  CHECK(std::size(kAllIrBugTypes) == 7);
  for (IrBugType t : kAllIrBugTypes) CHECK(ir_type_from_string(to_string(t)) == t);
  CHECK(ir_type_from_string(" functional_defect ") == IrBugType::kFunctionalDefect);
  CHECK_THROWS_AS(ir_type_from_string("Wrong_Save_Reload"), ParseError);
  CHECK(is_mismatch_type(IrBugType::kDeviceInconsistency));
  CHECK(is_mismatch_type(IrBugType::kJitEagerMismatch));
  CHECK(is_mismatch_type(IrBugType::kCompileEagerMismatch));
  CHECK_FALSE(is_mismatch_type(IrBugType::kFunctionalDefect));
  CHECK(kPrecisionTolerance.abs == 1e-4);
  CHECK(kPrecisionTolerance.rel == 1e-5);
}

TEST_CASE("match_ir on the hand-built fact fixtures") {
  auto cases = ir_cases();
  REQUIRE(cases.size() == 14);
  std::map<IrBugType, std::pair<int, int>> per_type;  // positives, negatives
  for (const auto& c : cases) {
    INFO(c.name);
    CHECK(match_ir(c.facts, c.type) == c.expected);
    (c.expected ? per_type[c.type].first : per_type[c.type].second)++;
  }
  for (IrBugType t : kAllIrBugTypes) {
    INFO(to_string(t));
    CHECK(per_type[t] == std::make_pair(1, 1));
  }
  // The device example has no jit-mode call.
  for (const auto& c : cases)
    if (c.name == "device_positive") CHECK_FALSE(match_ir(c.facts, IrBugType::kJitEagerMismatch));
}

TEST_CASE("match_ir binds consistently") {
  TraceFact a{FactKind::kVarDef, "tensor", "", {{"device", "cpu"}}, "v_cpu"};
  TraceFact b{FactKind::kVarDef, "tensor", "", {{"device", "cuda"}}, "v_gpu"};
  TraceFact cmp;
  cmp.kind = FactKind::kOracleCheck;
  cmp.type = "ValueCorrectness";
  cmp.condition = "Compare";
  cmp.outcome = "FAIL";
  SUBCASE("check compares something else") {
    cmp.operands = {"v_cpu", "v_other"};
    CHECK_FALSE(match_ir({a, b, cmp}, IrBugType::kDeviceInconsistency));
  }
  SUBCASE("device prefix must be whole") {
    b.attrs["device"] = "cudagraph";
    cmp.operands = {"v_cpu", "v_gpu"};
    CHECK_FALSE(match_ir({a, b, cmp}, IrBugType::kDeviceInconsistency));
  }
  SUBCASE("jit needs one api on both sides") {
    TraceFact e{FactKind::kApiCall, "", "torch.add", {{"mode", "eager"}}, "v1"};
    TraceFact j{FactKind::kApiCall, "", "torch.sub", {{"mode", "jit_trace"}}, "v2"};
    cmp.operands = {"v1", "v2"};
    CHECK_FALSE(match_ir({e, j, cmp}, IrBugType::kJitEagerMismatch));
    j.api = "torch.add";
    CHECK(match_ir({e, j, cmp}, IrBugType::kJitEagerMismatch));
  }
}

TEST_CASE("fact json round trip and errors") {
  for (const auto& c : ir_cases())
    for (const auto& f : c.facts) CHECK(TraceFact::from_json(f.to_json()) == f);
  CHECK_THROWS_AS(TraceFact::from_json(Json{{"kind", "Lambda"}}), ParseError);
  CHECK_THROWS_AS(TraceFact::from_json(Json{{"kind", "OracleCheck"}}), ParseError);
  CHECK_THROWS_AS(TraceFact::from_json(Json{{"kind", "VarDef"}, {"operands", 3}}), ParseError);
}

TEST_CASE("signal crashes map onto the fault set") {
  CHECK(fault_kind_for_signal("SIGSEGV") == "SegFault");
  CHECK(fault_kind_for_signal("SIGFPE") == "FloatingPointException");
  CHECK(fault_kind_for_signal("SIGABRT") == "Aborted");
  harness::ExecutionResult r;
  r.status = harness::ExecStatus::kCrash;
  for (const char* sig : {"SIGSEGV", "SIGFPE", "SIGABRT"}) {
    r.signal_name = sig;
    CHECK(match_ir(execution_facts("m.f", r), IrBugType::kExecutionCrash));
  }
  r.signal_name = "SIGKILL";
  CHECK_FALSE(match_ir(execution_facts("m.f", r), IrBugType::kExecutionCrash));
  harness::ExecutionResult ok;
  CHECK_FALSE(match_ir(execution_facts("m.f", ok), IrBugType::kExecutionCrash));
}

TEST_CASE("worked filters and the passing case under replay") {
  auto cassette = testutil::record_scenarios(scenarios());
  auto gw = replay_gateway(cassette);
  Validator validator(gw);
  for (const auto& s : scenarios()) {
    INFO(s.name);
    auto v = validator.validate(s.candidate());
    CHECK(v.final == s.expect.at("final").get<bool>());
    CHECK_FALSE(v.incomplete);
    if (s.expect.at("failure_stage").is_null()) {
      CHECK_FALSE(v.failure_stage.has_value());
    } else {
      REQUIRE(v.failure_stage.has_value());
      CHECK(*v.failure_stage == s.expect.at("failure_stage").get<std::string>());
    }
    std::vector<std::string> names;
    for (const auto& st : v.stages) names.push_back(st.stage);
    CHECK(names == s.expect.at("stages").get<std::vector<std::string>>());
    // Short-circuit: only the last stage may fail, and every stage has 3 epochs.
    for (std::size_t i = 0; i < v.stages.size(); ++i) {
      if (i + 1 < v.stages.size()) CHECK(v.stages[i].passed);
      CHECK(v.stages[i].epochs.size() == 3);
    }
    if (v.final) {
      for (const auto& st : v.stages) CHECK(st.passed);
      CHECK(v.stage(stage::kCriteriaJudgment) != nullptr);
    }
    if (s.expect.contains("reason")) CHECK(v.reason == s.expect.at("reason").get<std::string>());
    if (s.expect.contains("epochs")) {
      CHECK(v.stages.back().results() == s.expect.at("epochs").get<std::vector<bool>>());
    }
    if (s.expect.contains("deterministic")) {
      for (const auto& name : s.expect.at("deterministic").get<std::vector<std::string>>()) {
        REQUIRE(v.stage(name) != nullptr);
        CHECK(v.stage(name)->deterministic);
        CHECK(v.stage(name)->epochs.front().exchanges.empty());
      }
    }
  }
}

TEST_CASE("verdicts are deterministic and persist") {
  auto cassette = testutil::record_scenarios(scenarios());
  auto g1 = replay_gateway(cassette);
  auto g2 = replay_gateway(cassette);
  Validator a(g1), b(g2);
  testutil::TempDir dir;
  for (const auto& s : scenarios()) {
    auto v1 = a.validate(s.candidate());
    auto v2 = b.validate(s.candidate());
    CHECK(v1 == v2);
    append_verdict(dir.path() / "verdicts.jsonl", v1);
  }
  auto loaded = load_verdicts(dir.path() / "verdicts.jsonl");
  REQUIRE(loaded.size() == scenarios().size());
  const auto& criteria_case = scenario("criteria_reject_argmax_to_amax");
  CHECK(loaded[2] == a.validate(criteria_case.candidate()));
  const auto* judged = loaded[2].stage(stage::kCriteriaJudgment);
  REQUIRE(judged != nullptr);
  // Judgment, challenge and summary per epoch, each kept by hash.
  REQUIRE(judged->epochs[0].exchanges.size() == 3);
  CHECK(judged->epochs[0].exchanges[1].template_id == "debate_challenge");
  CHECK(judged->epochs[0].exchanges[2].response_sha256.size() == 64);
}

TEST_CASE("criteria and suitability are cached per issue") {
  testutil::ScenarioScript script(scenarios());
  auto provider = std::make_shared<llm::ScriptedChatProvider>(
      [&](const llm::LlmRequest& r) { return script(r); });
  llm::GatewayOptions o;
  o.mode = llm::Mode::kRecord;
  llm::Gateway gw(o, std::make_shared<llm::Cassette>(), provider);
  Validator v(gw);
  const auto& s = scenario("pass_bf16_probe");
  CHECK(v.validate(s.candidate()).final);
  const int first = provider->calls();
  // 3 epochs of type, pattern and oracle; 4 x 3 suitability; 1 extraction; 3 x 3 debate.
  CHECK(first == 9 + 12 + 1 + 9);
  // A second candidate from the same issue only pays for its own stages.
  engine::TransferredTest other = s.test;
  other.program_source += "\n";
  CHECK(v.validate({s.issue, s.pattern, other, s.execution}).final);
  CHECK(provider->calls() - first == 9 + 9);
  const int before = provider->calls();
  auto [flags, stage_record] = v.assess_issue_suitability(s.issue);
  CHECK(flags.all());
  CHECK(stage_record.passed);
  CHECK(provider->calls() == before);

  auto [bad, bad_stage] = v.assess_issue_suitability(scenario("unsuitable_issue").issue);
  CHECK_FALSE(bad.developer_negative_feedback_absent);
  CHECK(bad.api_level_relevance);
  CHECK(bad.has_demo);
  CHECK(bad.complexity_acceptable);
  CHECK_FALSE(bad_stage.passed);
}

TEST_CASE("a gateway failure leaves an incomplete verdict") {
  auto gw = replay_gateway(std::make_shared<llm::Cassette>());
  Validator v(gw);
  const auto& s = scenario("pattern_mismatch_clamp_to_clip");
  auto verdict = v.validate(s.candidate());
  CHECK(verdict.incomplete);
  CHECK_FALSE(verdict.final);
  REQUIRE(verdict.failure_stage.has_value());
  CHECK(*verdict.failure_stage == stage::kSameBugType);
  CHECK(verdict.reason.starts_with("incomplete"));

  // A crash needs no model for the symptom stages, so it stops later.
  const auto& crash = scenario("signal_crash");
  auto cv = v.validate(crash.candidate());
  CHECK(cv.incomplete);
  CHECK(*cv.failure_stage == stage::kOracleCorrectness);
  CHECK(cv.stages.size() == 2);
}

TEST_CASE("unusable answers fail the epoch instead of the run") {
  llm::GatewayOptions o;
  o.mode = llm::Mode::kLive;
  auto provider = std::make_shared<llm::ScriptedChatProvider>([](const llm::LlmRequest& r) {
    if (r.template_id == llm::TemplateId::kSameBugType ||
        r.template_id == llm::TemplateId::kFormatRepair)
      return FieldBlock::render("VERDICT", {{"original_type", "Wrong_Outputs"},
                                            {"transferred_type", "Functional_Defect"}});
    return std::string("unused");
  });
  llm::Gateway gw(o, std::make_shared<llm::Cassette>(), provider);
  Validator v(gw);
  auto verdict = v.validate(scenario("pattern_mismatch_clamp_to_clip").candidate());
  CHECK_FALSE(verdict.incomplete);
  CHECK(*verdict.failure_stage == stage::kSameBugType);
  CHECK(verdict.stages.front().results() == std::vector<bool>{false, false, false});
  CHECK(verdict.stages.front().note.find("unknown bug type") != std::string::npos);
  // One ask plus three re-asks per epoch.
  CHECK(provider->calls() == 3 * 4);
}

TEST_CASE("validating a test whose oracle never fired is a caller error") {
  auto gw = replay_gateway(std::make_shared<llm::Cassette>());
  Validator v(gw);
  const auto& s = scenario("pattern_mismatch_clamp_to_clip");
  harness::ExecutionResult quiet;
  CHECK_THROWS_AS(v.validate({s.issue, s.pattern, s.test, quiet}), InvariantError);
}
