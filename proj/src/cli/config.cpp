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

#include "pfuzz/cli/config.hpp"

#include <set>
#include <sstream>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/text.hpp"
#include "toml.hpp"

namespace pfuzz::cli {

namespace {

class Section {
 public:
  Section(const toml::table* t, std::string name) : t_(t), name_(std::move(name)) {}

  // Every key of the section must be one of `known`.
  void only(std::initializer_list<std::string_view> known) const {
    if (!t_) return;
    std::set<std::string_view> ok(known);
    for (const auto& [k, v] : *t_)
      if (!ok.count(k.str())) throw ParseError("unknown key " + name_ + "." + std::string(k.str()));
  }

  void get(std::string_view key, std::string& out) const {
    if (auto* n = node(key)) {
      auto v = n->value<std::string>();
      if (!v) throw wrong(key, "a string");
      out = *v;
    }
  }
  template <typename Int>
  void get_int(std::string_view key, Int& out) const {
    if (auto* n = node(key)) {
      auto v = n->value<std::int64_t>();
      if (!v || !n->is_integer()) throw wrong(key, "an integer");
      if (*v < 0) throw wrong(key, "non-negative");
      out = static_cast<Int>(*v);
    }
  }
  void get(std::string_view key, double& out) const {
    if (auto* n = node(key)) {
      auto v = n->value<double>();
      if (!v) throw wrong(key, "a number");
      out = *v;
    }
  }
  void get(std::string_view key, std::vector<std::string>& out) const {
    if (auto* n = node(key)) {
      auto* arr = n->as_array();
      if (!arr) throw wrong(key, "an array of strings");
      std::vector<std::string> v;
      for (const auto& e : *arr) {
        auto s = e.value<std::string>();
        if (!s || !e.is_string()) throw wrong(key, "an array of strings");
        v.push_back(*s);
      }
      out = std::move(v);
    }
  }
  // Money is written as a string ("2.50") or an integer, never a float.
  std::optional<Money> money(std::string_view key) const {
    auto* n = node(key);
    if (!n) return std::nullopt;
    if (n->is_integer()) return Money::parse(std::to_string(*n->value<std::int64_t>()));
    if (n->is_string()) return Money::parse(*n->value<std::string>());
    throw wrong(key, "a quoted decimal such as \"2.50\"");
  }

  const toml::table* table() const { return t_; }
  const std::string& name() const { return name_; }

 private:
  const toml::node* node(std::string_view key) const { return t_ ? t_->get(key) : nullptr; }
  ParseError wrong(std::string_view key, std::string_view what) const {
    return ParseError(name_ + "." + std::string(key) + " must be " + std::string(what));
  }

  const toml::table* t_;
  std::string name_;
};

Section section(const toml::table& root, std::string_view name) {
  const toml::node* n = root.get(name);
  if (n && !n->is_table()) throw ParseError(std::string(name) + " must be a table");
  return {n ? n->as_table() : nullptr, std::string(name)};
}

}  // namespace

Config parse_config(std::string_view toml_text, std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ": " << e.description();
    throw ParseError(os.str());
  }
  for (const auto& [k, v] : root) {
    static const std::set<std::string_view> known = {"models", "campaign", "harness", "corpus"};
    if (!known.count(k.str())) throw ParseError("unknown section " + std::string(k.str()));
  }

  Config c;
  const std::string components[] = {
      std::string(llm::component::kPatternExtraction), std::string(llm::component::kApiMatching),
      std::string(llm::component::kBugTransfer), std::string(llm::component::kSelfValidation)};

  Section models = section(root, "models");
  models.only({"default", "embedding", components[0], components[1], components[2], components[3],
               "base_url", "api_key_env", "max_in_flight", "max_attempts", "max_tokens", "prices"});
  models.get("default", c.gateway.default_model);
  models.get("embedding", c.gateway.embedding_model);
  for (const auto& comp : components) {
    std::string model;
    models.get(comp, model);
    if (!model.empty()) c.gateway.models[comp] = model;
  }
  models.get("base_url", c.base_url);
  models.get("api_key_env", c.api_key_env);
  models.get_int("max_in_flight", c.gateway.max_in_flight);
  models.get_int("max_attempts", c.gateway.max_attempts);
  models.get_int("max_tokens", c.gateway.max_tokens);
  if (models.table()) {
    if (const toml::node* p = models.table()->get("prices")) {
      if (!p->is_table()) throw ParseError("models.prices must be a table");
      for (const auto& [model, entry] : *p->as_table()) {
        if (!entry.is_table()) throw ParseError("models.prices." + std::string(model.str()) + " must be a table");
        Section s(entry.as_table(), "models.prices." + std::string(model.str()));
        s.only({"input", "output"});
        auto in = s.money("input");
        auto out = s.money("output");
        if (!in || !out) throw ParseError(s.name() + " needs both input and output");
        c.gateway.prices[std::string(model.str())] = {*in, *out};
      }
    }
  }

  Section campaign = section(root, "campaign");
  campaign.only({"window_size", "queue_depth", "expansion_count", "repeats", "timeout_seconds",
                 "max_tests_per_pattern", "budget"});
  campaign.get_int("window_size", c.campaign.window_size);
  campaign.get_int("queue_depth", c.campaign.queue_depth);
  campaign.get_int("expansion_count", c.campaign.expansion_count);
  campaign.get_int("repeats", c.campaign.repeats);
  campaign.get("timeout_seconds", c.campaign.timeout_seconds);
  campaign.get_int("max_tests_per_pattern", c.campaign.max_tests_per_pattern);
  if (auto b = campaign.money("budget")) c.campaign.budget = b;

  Section harness = section(root, "harness");
  harness.only({"command", "library", "parallelism", "transcript"});
  harness.get("command", c.harness_command);
  harness.get("library", c.library);
  harness.get_int("parallelism", c.campaign.parallelism);
  harness.get("transcript", c.harness_transcript);
  if (c.harness_command.empty()) throw ParseError("harness.command must not be empty");

  Section corpus = section(root, "corpus");
  corpus.only({"repos", "base_url", "token_env"});
  corpus.get("repos", c.repos);
  corpus.get("base_url", c.github_url);
  corpus.get("token_env", c.github_token_env);

  try {
    c.campaign.validate();
  } catch (const InvariantError& e) {
    throw ParseError(std::string(source) + ": " + e.what());
  }
  c.gateway.budget = c.campaign.budget;
  return c;
}

Config load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.string());
}

}  // namespace pfuzz::cli
