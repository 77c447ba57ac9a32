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

#ifndef PFUZZ_LLM_PROVIDER_HPP_
#define PFUZZ_LLM_PROVIDER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "pfuzz/llm/types.hpp"

namespace pfuzz::llm {

struct ProviderReply {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct EmbeddingReply {
  std::vector<std::vector<double>> vectors;  // one per input, in order
  std::vector<std::int64_t> tokens;          // billed tokens per input
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  // Throws ProviderError on transport or API failure.
  virtual ProviderReply chat(const LlmRequest& request) = 0;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual EmbeddingReply embed(const std::string& model_id,
                               std::span<const std::string> texts) = 0;
};

/// Chat provider backed by a callback. Used to script conversations when
/// recording fixture cassettes offline.
class ScriptedChatProvider : public ChatProvider {
 public:
  using Script = std::function<std::string(const LlmRequest&)>;
  explicit ScriptedChatProvider(Script script) : script_(std::move(script)) {}

  ProviderReply chat(const LlmRequest& request) override;
  int calls() const;

 private:
  Script script_;
  mutable std::mutex mu_;
  int calls_ = 0;
};

/// Text -> vector lookup loaded from a JSON object {"text": [values...]}.
/// Unknown texts throw ProviderError. Token count is the word count.
class FixtureEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit FixtureEmbeddingProvider(std::map<std::string, std::vector<double>> table)
      : table_(std::move(table)) {}
  static FixtureEmbeddingProvider load(const std::filesystem::path& path);

  EmbeddingReply embed(const std::string& model_id,
                       std::span<const std::string> texts) override;

 private:
  std::map<std::string, std::vector<double>> table_;
};

}  // namespace pfuzz::llm

#endif  // PFUZZ_LLM_PROVIDER_HPP_
