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

#include "pfuzz/llm/openai_provider.hpp"

#include "pfuzz/common/error.hpp"

// After Eigen: resolv.h, pulled in by httplib, defines a `_res` macro.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace pfuzz::llm {

using nlohmann::json;

OpenAiProvider::OpenAiProvider(OpenAiOptions options) : options_(std::move(options)) {
  if (options_.api_key.empty()) throw ProviderError("missing API key");
}

json OpenAiProvider::chat_body(const LlmRequest& request) {
  json body{{"model", request.model_id},
            {"messages", json::array({{{"role", "user"},
                                       {"content", request.rendered_prompt}}})},
            {"max_completion_tokens", request.max_tokens}};
  if (request.temperature) body["temperature"] = *request.temperature;
  return body;
}

ProviderReply OpenAiProvider::decode_chat(const json& response) {
  try {
    ProviderReply reply;
    reply.text = response.at("choices").at(0).at("message").at("content").get<std::string>();
    const json& usage = response.at("usage");
    reply.prompt_tokens = usage.at("prompt_tokens").get<std::int64_t>();
    reply.completion_tokens = usage.at("completion_tokens").get<std::int64_t>();
    return reply;
  } catch (const json::exception& e) {
    throw ProviderError(std::string("unexpected chat response: ") + e.what());
  }
}

EmbeddingReply OpenAiProvider::decode_embeddings(const json& response,
                                                 std::size_t expected) {
  try {
    EmbeddingReply reply;
    const json& data = response.at("data");
    reply.vectors.resize(data.size());
    for (const auto& item : data) {
      auto index = item.at("index").get<std::size_t>();
      if (index >= reply.vectors.size()) throw ProviderError("embedding index out of range");
      reply.vectors[index] = item.at("embedding").get<std::vector<double>>();
    }
    if (reply.vectors.size() != expected)
      throw ProviderError("embedding count does not match input count");
    // Usage is reported per request; bill it to the first input.
    reply.tokens.assign(expected, 0);
    if (expected > 0 && response.contains("usage"))
      reply.tokens[0] = response["usage"].value("prompt_tokens", std::int64_t{0});
    return reply;
  } catch (const json::exception& e) {
    throw ProviderError(std::string("unexpected embedding response: ") + e.what());
  }
}

json OpenAiProvider::post(const std::string& path, const json& body) {
  httplib::Client client(options_.base_url);
  client.set_read_timeout(options_.timeout_seconds, 0);
  client.set_write_timeout(options_.timeout_seconds, 0);
  client.set_bearer_token_auth(options_.api_key);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) throw ProviderError("HTTP error: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw ProviderError("HTTP " + std::to_string(res->status) + ": " + res->body);
  try {
    return json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw ProviderError(std::string("response is not JSON: ") + e.what());
  }
}

ProviderReply OpenAiProvider::chat(const LlmRequest& request) {
  return decode_chat(post("/v1/chat/completions", chat_body(request)));
}

EmbeddingReply OpenAiProvider::embed(const std::string& model_id,
                                     std::span<const std::string> texts) {
  json body{{"model", model_id},
            {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  return decode_embeddings(post("/v1/embeddings", body), texts.size());
}

}  // namespace pfuzz::llm
