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

#ifndef PFUZZ_LLM_OPENAI_PROVIDER_HPP_
#define PFUZZ_LLM_OPENAI_PROVIDER_HPP_

#include <string>

#include "json.hpp"
#include "pfuzz/llm/provider.hpp"

namespace pfuzz::llm {

struct OpenAiOptions {
  std::string base_url = "https://api.openai.com";  // scheme://host[:port]
  std::string api_key;
  int timeout_seconds = 120;
};

/// Chat-completions and embeddings over any OpenAI-compatible endpoint.
/// One HTTP attempt per call; retrying is the gateway's job.
class OpenAiProvider : public ChatProvider, public EmbeddingProvider {
 public:
  explicit OpenAiProvider(OpenAiOptions options);

  ProviderReply chat(const LlmRequest& request) override;
  EmbeddingReply embed(const std::string& model_id,
                       std::span<const std::string> texts) override;

  // Exposed for tests: request body construction and response decoding.
  static nlohmann::json chat_body(const LlmRequest& request);
  static ProviderReply decode_chat(const nlohmann::json& response);
  static EmbeddingReply decode_embeddings(const nlohmann::json& response,
                                          std::size_t expected);

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body);

  OpenAiOptions options_;
};

}  // namespace pfuzz::llm

#endif  // PFUZZ_LLM_OPENAI_PROVIDER_HPP_
