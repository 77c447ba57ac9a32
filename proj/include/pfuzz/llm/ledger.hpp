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

#ifndef PFUZZ_LLM_LEDGER_HPP_
#define PFUZZ_LLM_LEDGER_HPP_

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "pfuzz/common/money.hpp"

namespace pfuzz::llm {

struct LedgerEntry {
  std::string component;
  std::string model_id;
  std::string template_id;
  Money cost;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

/// Append-only record of what every LLM call cost. Appends are serialized;
/// the per-component totals are kept alongside and always equal the sum of
/// the matching entries.
class CostLedger {
 public:
  CostLedger() = default;
  CostLedger(const CostLedger& other);
  CostLedger& operator=(const CostLedger& other);

  void append(LedgerEntry entry);

  std::vector<LedgerEntry> entries() const;
  std::map<std::string, Money> component_totals() const;
  Money total() const;

  nlohmann::json to_json() const;
  static CostLedger from_json(const nlohmann::json& j);

 private:
  mutable std::mutex mu_;
  std::vector<LedgerEntry> entries_;
  std::map<std::string, Money> totals_;
};

}  // namespace pfuzz::llm

#endif  // PFUZZ_LLM_LEDGER_HPP_
