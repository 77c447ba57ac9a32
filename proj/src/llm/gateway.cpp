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

#include "pfuzz/llm/gateway.hpp"

#include <thread>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/jsonl.hpp"

namespace pfuzz::llm {

namespace {

// Holds one in-flight slot for the lifetime of a live call.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& sem_;
};

}  // namespace

Gateway::Gateway(GatewayOptions options, std::shared_ptr<Cassette> cassette,
                 std::shared_ptr<ChatProvider> chat,
                 std::shared_ptr<EmbeddingProvider> embeddings,
                 const TemplateRegistry* templates)
    : options_(std::move(options)),
      cassette_(cassette ? std::move(cassette) : std::make_shared<Cassette>()),
      chat_(std::move(chat)),
      embeddings_(std::move(embeddings)),
      templates_(templates ? templates : &default_templates()) {
  if (options_.max_in_flight < 1 || options_.max_in_flight > 1024)
    throw InvariantError("max_in_flight must lie in [1, 1024]");
  if (options_.max_attempts < 1) throw InvariantError("max_attempts must be >= 1");
  in_flight_ = std::make_unique<std::counting_semaphore<1024>>(options_.max_in_flight);
}

LlmRequest Gateway::make_request(TemplateId id, std::string rendered_prompt,
                                 std::string component) const {
  LlmRequest req;
  req.template_id = id;
  req.rendered_prompt = std::move(rendered_prompt);
  req.component = component.empty() ? std::string(default_component(id))
                                    : std::move(component);
  auto it = options_.models.find(req.component);
  req.model_id = it != options_.models.end() ? it->second : options_.default_model;
  if (is_validation_template(id)) req.temperature = 0.0;
  req.max_tokens = options_.max_tokens;
  return req;
}

LlmRequest Gateway::make_request(TemplateId id,
                                 const std::map<std::string, std::string>& slots,
                                 std::string component) const {
  return make_request(id, templates_->render(id, slots), std::move(component));
}

Money Gateway::price(const std::string& model, std::int64_t in, std::int64_t out) const {
  auto it = options_.prices.find(model);
  if (it == options_.prices.end()) return Money{};
  return it->second.cost(in, out);
}

void Gateway::check_budget() const {
  if (options_.budget && ledger_.total() >= *options_.budget)
    throw BudgetExceededError("budget of " + options_.budget->to_string() +
                              " exhausted (spent " + ledger_.total().to_string() + ")");
}

template <typename Fn>
auto Gateway::with_retries(Fn&& fn) {
  SlotGuard slot(*in_flight_);
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const ProviderError&) {
      if (attempt >= options_.max_attempts) throw;
      std::this_thread::sleep_for(options_.backoff_base * (1 << (attempt - 1)));
    }
  }
}

LlmResponse Gateway::complete(const LlmRequest& request, int epoch) {
  request.validate();
  check_budget();
  const std::string component = request.component.empty()
                                    ? std::string(default_component(request.template_id))
                                    : request.component;
  const CassetteKey key = CassetteKey::of(request.template_id, request.rendered_prompt, epoch);

  CassetteEntry entry;
  std::optional<CassetteEntry> recorded;
  if (options_.mode != Mode::kLive) recorded = cassette_->find(key);

  if (recorded) {
    entry = std::move(*recorded);
  } else if (options_.mode == Mode::kReplay) {
    throw CassetteMissError(key.str());
  } else {
    if (!chat_) throw ProviderError("no chat provider configured");
    ProviderReply reply = with_retries([&] { return chat_->chat(request); });
    entry = CassetteEntry{request.model_id, std::move(reply.text), reply.prompt_tokens,
                          reply.completion_tokens};
    if (options_.mode == Mode::kRecord) cassette_->insert(key, entry);
  }

  LlmResponse response;
  response.prompt_tokens = entry.prompt_tokens;
  response.completion_tokens = entry.completion_tokens;
  response.cost = price(entry.model_id, entry.prompt_tokens, entry.completion_tokens);
  response.text = std::move(entry.text);
  ledger_.append(LedgerEntry{component, entry.model_id,
                             std::string(to_string(request.template_id)), response.cost,
                             response.prompt_tokens, response.completion_tokens});
  return response;
}

std::vector<EmbeddingVector> Gateway::embed(std::span<const std::string> texts) {
  if (texts.empty()) throw InvariantError("embed() needs at least one text");
  for (const auto& t : texts)
    if (t.empty()) throw InvariantError("cannot embed an empty text");
  check_budget();

  const std::string& model = options_.embedding_model;
  std::vector<std::optional<CassetteEntry>> entries(texts.size());
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (options_.mode != Mode::kLive)
      entries[i] = cassette_->find(CassetteKey::of(TemplateId::kEmbedding, texts[i], 0));
    if (!entries[i]) {
      if (options_.mode == Mode::kReplay)
        throw CassetteMissError(CassetteKey::of(TemplateId::kEmbedding, texts[i], 0).str());
      missing.push_back(i);
    }
  }

  if (!missing.empty()) {
    if (!embeddings_) throw ProviderError("no embedding provider configured");
    std::vector<std::string> batch;
    for (std::size_t i : missing) batch.push_back(texts[i]);
    EmbeddingReply reply = with_retries([&] { return embeddings_->embed(model, batch); });
    if (reply.vectors.size() != batch.size())
      throw ProviderError("embedding provider returned the wrong number of vectors");
    for (std::size_t k = 0; k < missing.size(); ++k) {
      CassetteEntry e{model, Json(reply.vectors[k]).dump(),
                      k < reply.tokens.size() ? reply.tokens[k] : 0, 0};
      const auto key = CassetteKey::of(TemplateId::kEmbedding, texts[missing[k]], 0);
      // Identical texts in one batch share a key; record it once.
      if (options_.mode == Mode::kRecord && !cassette_->find(key)) cassette_->insert(key, e);
      entries[missing[k]] = std::move(e);
    }
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  std::int64_t tokens = 0;
  std::string model_id;
  for (auto& e : entries) {
    std::vector<double> values;
    try {
      values = Json::parse(e->text).get<std::vector<double>>();
    } catch (const Json::exception& ex) {
      throw ParseError(std::string("recorded embedding is not a number array: ") + ex.what());
    }
    EmbeddingVector v;
    v.model_id = e->model_id;
    v.values = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                 static_cast<Eigen::Index>(values.size()));
    if (v.dim() == 0) throw InvariantError("embedding has zero dimension");
    if (!out.empty() && out.front().dim() != v.dim())
      throw InvariantError("embedding dimension mismatch within one batch");
    tokens += e->prompt_tokens;
    model_id = e->model_id;
    out.push_back(std::move(v));
  }
  Money cost = price(model_id, tokens, 0);
  ledger_.append(LedgerEntry{std::string(component::kApiMatching), model_id,
                             std::string(to_string(TemplateId::kEmbedding)), cost, tokens, 0});
  return out;
}

}  // namespace pfuzz::llm
