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

#ifndef PFUZZ_LLM_GATEWAY_HPP_
#define PFUZZ_LLM_GATEWAY_HPP_

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <vector>

#include "pfuzz/common/money.hpp"
#include "pfuzz/llm/cassette.hpp"
#include "pfuzz/llm/ledger.hpp"
#include "pfuzz/llm/provider.hpp"
#include "pfuzz/llm/templates.hpp"
#include "pfuzz/llm/types.hpp"

namespace pfuzz::llm {

struct GatewayOptions {
  Mode mode = Mode::kReplay;
  // Ledger component -> model id. Components missing here use default_model.
  std::map<std::string, std::string> models;
  std::string default_model = "gpt-4o-mini";
  std::string embedding_model = "text-embedding-3-small";
  std::map<std::string, ModelPrice> prices;  // unknown models cost nothing
  std::optional<Money> budget;
  int max_attempts = 3;
  std::chrono::milliseconds backoff_base{500};
  int max_in_flight = 4;
  int max_tokens = 4096;
};

/// Single entry point for chat completions and embeddings.
///
/// In replay mode every answer comes from the cassette and nothing touches
/// the network. Record mode serves keys already on the cassette and records
/// the rest; live mode never reads or writes the cassette.
class Gateway {
 public:
  Gateway(GatewayOptions options, std::shared_ptr<Cassette> cassette,
          std::shared_ptr<ChatProvider> chat = nullptr,
          std::shared_ptr<EmbeddingProvider> embeddings = nullptr,
          const TemplateRegistry* templates = &default_templates());

  Mode mode() const { return options_.mode; }
  const TemplateRegistry& templates() const { return *templates_; }

  /// Request routed to the model configured for the template's component.
  /// Validation templates are pinned to temperature 0.
  LlmRequest make_request(TemplateId id, std::string rendered_prompt,
                          std::string component = {}) const;
  LlmRequest make_request(TemplateId id,
                          const std::map<std::string, std::string>& slots,
                          std::string component = {}) const;

  /// Throws CassetteMissError (replay), ProviderError (after retries) or
  /// BudgetExceededError (spend already at or past the cap).
  LlmResponse complete(const LlmRequest& request, int epoch = 0);

  /// One vector per text, same order, all with one dimension.
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts);

  const CostLedger& ledger() const { return ledger_; }
  CostLedger& ledger() { return ledger_; }
  const std::shared_ptr<Cassette>& cassette() const { return cassette_; }

 private:
  Money price(const std::string& model, std::int64_t in, std::int64_t out) const;
  void check_budget() const;
  template <typename Fn>
  auto with_retries(Fn&& fn);

  GatewayOptions options_;
  std::shared_ptr<Cassette> cassette_;
  std::shared_ptr<ChatProvider> chat_;
  std::shared_ptr<EmbeddingProvider> embeddings_;
  const TemplateRegistry* templates_;
  CostLedger ledger_;
  std::unique_ptr<std::counting_semaphore<1024>> in_flight_;
};

}  // namespace pfuzz::llm

#endif  // PFUZZ_LLM_GATEWAY_HPP_
