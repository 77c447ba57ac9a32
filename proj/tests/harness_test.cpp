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

#include <sstream>

#include "doctest.h"
#include "pfuzz/common/error.hpp"
#include "pfuzz/harness/harness.hpp"
#include "test_util.hpp"

using namespace pfuzz;
using namespace pfuzz::harness;

TEST_CASE("marker rule is exact") {
  ExecutionResult r;
  r.stdout_text = "BUG FOUND\n";
  r.normalize();
  CHECK(r.bug_found);
  for (const char* variant : {"bug found\n", "BUG FOUND \n", " BUG FOUND\n", "BUG_FOUND\n"}) {
    r.stdout_text = variant;
    r.normalize();
    CHECK_FALSE(r.bug_found);
  }
  r.status = ExecStatus::kCrash;
  CHECK_THROWS_AS(r.normalize(), HarnessError);  // crash without a signal
  r.signal_name = "SIGABRT";
  r.normalize();
  CHECK(oracle_fired(r));
}

TEST_CASE("execution result round trip") {
  ExecutionResult r;
  r.status = ExecStatus::kTimeout;
  r.exit_code = -9;
  r.stdout_text = "a\n";
  r.trace = {{"assignment", "a", "1"}, {"call_chain_step", "a.b()", "<obj>"}};
  r.wall_time_seconds = 1.25;
  CHECK(ExecutionResult::from_json(r.to_json()) == r);
  CHECK_THROWS_AS(ExecutionResult::from_json(Json{{"status", "weird"}}), ParseError);
}

TEST_CASE("serve loop survives bad requests") {
  auto h = TranscriptHarness::load(testutil::fixture("harness/basic.json"));
  std::istringstream in(
      "{not json\n"
      "{\"action\":\"dance\"}\n"
      "{\"action\":\"execute\",\"program\":\"print('BUG FOUND')\",\"timeout_seconds\":0}\n"
      "{\"action\":\"execute\",\"program\":\"oracle_hit\",\"timeout_seconds\":5}\n");
  std::ostringstream out;
  serve(*h, in, out);
  auto lines = std::istringstream(out.str());
  std::vector<Json> replies;
  for (std::string l; std::getline(lines, l);) replies.push_back(Json::parse(l));
  REQUIRE(replies.size() == 4);
  CHECK(replies[0]["status"] == "error");
  CHECK(replies[1]["status"] == "error");
  CHECK(replies[2]["status"] == "error");  // non-positive timeout
  CHECK(replies[3]["status"] == "ok");
  CHECK(replies[3]["bug_found"] == true);
}

TEST_CASE("process client against the mock harness") {
  ProcessHarness h({PFUZZ_MOCK_HARNESS, testutil::fixture("harness/basic.json").string()});
  auto apis = h.catalog("stub");
  REQUIRE(apis.size() == 1);
  CHECK(apis[0]["qualified_name"] == "stub.math.add");

  auto hit = h.execute("oracle_hit()", 5);
  CHECK(hit.bug_found);  // recomputed from stdout, not trusted
  CHECK(hit.trace.size() == 1);
  auto lower = h.execute("lower_hit()", 5);
  CHECK_FALSE(lower.bug_found);
  auto crash = h.execute("segv()", 5);
  CHECK(crash.status == ExecStatus::kCrash);
  CHECK(crash.signal_name == "SIGSEGV");
  CHECK(h.instrument("a = 1") == "a = 1");
  CHECK_THROWS_AS(h.instrument("f(("), HarnessError);

  auto raw = h.roundtrip({{"action", "nope"}}, 5);
  CHECK(raw["status"] == "error");
  CHECK(h.execute("x = 2", 5).stdout_text == "fine\n");  // still serving
}

TEST_CASE("dead harness is an error") {
  ProcessHarness h({"true"});
  CHECK_THROWS_AS(h.execute("x", 1), HarnessError);
  CHECK_THROWS_AS(ProcessHarness({}), InvariantError);
}
