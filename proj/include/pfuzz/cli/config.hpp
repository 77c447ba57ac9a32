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

#ifndef PFUZZ_CLI_CONFIG_HPP_
#define PFUZZ_CLI_CONFIG_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pfuzz/engine/campaign.hpp"
#include "pfuzz/llm/gateway.hpp"

namespace pfuzz::cli {

/// Everything the command line reads from its TOML file.
///
///   [models]    default, embedding, one key per ledger component
///               (bug_pattern_extraction, api_matching, bug_transfer,
///               self_validation), base_url, api_key_env, max_in_flight,
///               max_attempts, max_tokens
///   [models.prices."<model>"]  input, output (currency per 10^6 tokens)
///   [campaign]  window_size, queue_depth, expansion_count, repeats,
///               timeout_seconds, max_tests_per_pattern, budget
///   [harness]   command (argv list), library, parallelism, transcript
///   [corpus]    repos, base_url, token_env
///
/// Unknown keys are errors, so a typo never silently falls back to a default.
struct Config {
  llm::GatewayOptions gateway;
  std::string base_url = "https://api.openai.com";
  std::string api_key_env = "OPENAI_API_KEY";

  engine::CampaignConfig campaign;

  std::vector<std::string> harness_command = {"python3", "-m", "pfuzz_harness"};
  std::string library = "torch";
  // A TranscriptHarness file used instead of launching the sidecar.
  std::string harness_transcript;

  std::vector<std::string> repos = {"pytorch/pytorch"};
  std::string github_url = "https://api.github.com";
  std::string github_token_env = "GITHUB_TOKEN";
};

/// Throws ParseError with the offending key or line.
Config parse_config(std::string_view toml_text, std::string_view source = "config");
Config load_config(const std::filesystem::path& path);

}  // namespace pfuzz::cli

#endif  // PFUZZ_CLI_CONFIG_HPP_
