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

#include "pfuzz/cli/config.hpp"
#include "pfuzz/common/error.hpp"
#include "test_util.hpp"

using namespace pfuzz;
using pfuzz::cli::parse_config;

TEST_CASE("empty config gives the defaults") {
  auto c = parse_config("");
  CHECK(c.campaign == engine::CampaignConfig{});
  CHECK(c.gateway.models.empty());
  CHECK(c.harness_command == std::vector<std::string>{"python3", "-m", "pfuzz_harness"});
  CHECK_FALSE(c.gateway.budget);
}

TEST_CASE("shipped example") {
  auto c = cli::load_config(testutil::fixture("../../config/example.toml"));
  CHECK(c.gateway.models.at("bug_transfer") == "o3-mini");
  CHECK(c.gateway.models.at("api_matching") == "gpt-4o-mini");
  CHECK(c.gateway.prices.at("o3-mini").input_per_million == Money::parse("1.10"));
  CHECK(c.gateway.prices.at("o3-mini").output_per_million == Money::parse("4.40"));
  CHECK(c.campaign == engine::CampaignConfig{});
  CHECK(c.library == "torch");
}

TEST_CASE("overrides") {
  auto c = parse_config(R"(
[models]
self_validation = "big"
[campaign]
window_size = 5
repeats = 1
budget = "12.50"
[harness]
command = ["./h", "--serve"]
parallelism = 4
)");
  CHECK(c.gateway.models.at("self_validation") == "big");
  CHECK(c.campaign.window_size == 5);
  CHECK(c.campaign.repeats == 1);
  CHECK(c.campaign.parallelism == 4);
  CHECK(c.campaign.budget == Money::parse("12.5"));
  CHECK(c.gateway.budget == c.campaign.budget);
  CHECK(c.harness_command == std::vector<std::string>{"./h", "--serve"});
}

TEST_CASE("mistakes are reported") {
  CHECK_THROWS_WITH_AS(parse_config("[campaign]\nwindow = 3\n"), doctest::Contains("campaign.window"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse_config("[modles]\n"), doctest::Contains("modles"), ParseError);
  CHECK_THROWS_WITH_AS(parse_config("[campaign]\nbudget = 2.5\n"), doctest::Contains("quoted"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse_config("[campaign]\nwindow_size = \"ten\"\n"),
                       doctest::Contains("integer"), ParseError);
  CHECK_THROWS_WITH_AS(parse_config("[campaign]\nwindow_size = 0\n"),
                       doctest::Contains("window_size"), ParseError);
  CHECK_THROWS_WITH_AS(parse_config("[campaign\n", "x.toml"), doctest::Contains("x.toml:1"),
                       ParseError);
  CHECK_THROWS_AS(parse_config("[models.prices.m]\ninput = \"1\"\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[harness]\ncommand = []\n"), ParseError);
}
