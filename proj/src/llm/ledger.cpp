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

#include "pfuzz/llm/ledger.hpp"

#include "pfuzz/common/jsonl.hpp"

namespace pfuzz::llm {

CostLedger::CostLedger(const CostLedger& other) {
  std::lock_guard lock(other.mu_);
  entries_ = other.entries_;
  totals_ = other.totals_;
}

CostLedger& CostLedger::operator=(const CostLedger& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  entries_ = other.entries_;
  totals_ = other.totals_;
  return *this;
}

void CostLedger::append(LedgerEntry entry) {
  std::lock_guard lock(mu_);
  totals_[entry.component] += entry.cost;
  entries_.push_back(std::move(entry));
}

std::vector<LedgerEntry> CostLedger::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::map<std::string, Money> CostLedger::component_totals() const {
  std::lock_guard lock(mu_);
  return totals_;
}

Money CostLedger::total() const {
  std::lock_guard lock(mu_);
  Money sum;
  for (const auto& [name, amount] : totals_) sum += amount;
  return sum;
}

nlohmann::json CostLedger::to_json() const {
  std::lock_guard lock(mu_);
  Json entries = Json::array();
  for (const auto& e : entries_) {
    entries.push_back({{"component", e.component},
                       {"model_id", e.model_id},
                       {"template_id", e.template_id},
                       {"cost", e.cost.to_string()},
                       {"prompt_tokens", e.prompt_tokens},
                       {"completion_tokens", e.completion_tokens}});
  }
  Json totals = Json::object();
  Money grand;
  for (const auto& [name, amount] : totals_) {
    totals[name] = amount.to_string();
    grand += amount;
  }
  return Json{{"entries", entries}, {"component_totals", totals},
              {"total", grand.to_string()}};
}

CostLedger CostLedger::from_json(const nlohmann::json& j) {
  CostLedger ledger;
  for (const auto& e : require_field(j, "entries")) {
    LedgerEntry entry;
    entry.component = require_string(e, "component");
    entry.model_id = require_string(e, "model_id");
    entry.template_id = e.value("template_id", "");
    entry.cost = Money::parse(require_string(e, "cost"));
    entry.prompt_tokens = require_int(e, "prompt_tokens");
    entry.completion_tokens = require_int(e, "completion_tokens");
    ledger.append(std::move(entry));
  }
  return ledger;
}

}  // namespace pfuzz::llm
