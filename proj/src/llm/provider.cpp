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

#include "pfuzz/llm/provider.hpp"

#include <sstream>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/jsonl.hpp"
#include "pfuzz/common/text.hpp"

namespace pfuzz::llm {

namespace {
std::int64_t word_count(const std::string& s) {
  std::istringstream in(s);
  std::int64_t n = 0;
  std::string w;
  while (in >> w) ++n;
  return n;
}
}  // namespace

ProviderReply ScriptedChatProvider::chat(const LlmRequest& request) {
  {
    std::lock_guard lock(mu_);
    ++calls_;
  }
  ProviderReply reply;
  reply.text = script_(request);
  reply.prompt_tokens = word_count(request.rendered_prompt);
  reply.completion_tokens = word_count(reply.text);
  return reply;
}

int ScriptedChatProvider::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

FixtureEmbeddingProvider FixtureEmbeddingProvider::load(
    const std::filesystem::path& path) {
  Json doc = Json::parse(read_file(path));
  if (!doc.is_object()) throw ParseError(path.string() + ": expected an object");
  std::map<std::string, std::vector<double>> table;
  for (const auto& [text, values] : doc.items())
    table[text] = values.get<std::vector<double>>();
  return FixtureEmbeddingProvider(std::move(table));
}

EmbeddingReply FixtureEmbeddingProvider::embed(const std::string& /*model_id*/,
                                               std::span<const std::string> texts) {
  EmbeddingReply reply;
  for (const auto& t : texts) {
    auto it = table_.find(t);
    if (it == table_.end())
      throw ProviderError("fixture embedding has no vector for '" + t + "'");
    reply.vectors.push_back(it->second);
    reply.tokens.push_back(word_count(t));
  }
  return reply;
}

}  // namespace pfuzz::llm
