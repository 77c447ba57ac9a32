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

#include "pfuzz/llm/cassette.hpp"

#include <charconv>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/jsonl.hpp"
#include "pfuzz/common/text.hpp"

namespace pfuzz::llm {

CassetteKey CassetteKey::of(TemplateId id, std::string_view rendered_prompt,
                            int epoch) {
  return CassetteKey{std::string(to_string(id)), sha256_hex(rendered_prompt), epoch};
}

std::string CassetteKey::str() const {
  return template_id + ":" + prompt_sha256 + ":" + std::to_string(epoch);
}

CassetteKey CassetteKey::parse(std::string_view s) {
  size_t a = s.find(':');
  size_t b = s.rfind(':');
  if (a == std::string_view::npos || a == b)
    throw ParseError("malformed cassette key '" + std::string(s) + "'");
  CassetteKey key;
  key.template_id = std::string(s.substr(0, a));
  template_from_string(key.template_id);  // must be a registered slot
  key.prompt_sha256 = std::string(s.substr(a + 1, b - a - 1));
  if (key.prompt_sha256.size() != 64)
    throw ParseError("malformed cassette key hash in '" + std::string(s) + "'");
  std::string_view ep = s.substr(b + 1);
  auto [ptr, ec] = std::from_chars(ep.data(), ep.data() + ep.size(), key.epoch);
  if (ec != std::errc() || ptr != ep.data() + ep.size() || key.epoch < 0)
    throw ParseError("malformed cassette key epoch in '" + std::string(s) + "'");
  return key;
}

Cassette Cassette::load(const std::filesystem::path& path) {
  Cassette cassette;
  for (const Json& doc : read_jsonl(path)) {
    CassetteKey key = CassetteKey::parse(require_string(doc, "key"));
    CassetteEntry entry;
    entry.model_id = require_string(doc, "model_id");
    entry.text = require_string(doc, "text");
    entry.prompt_tokens = require_int(doc, "prompt_tokens");
    entry.completion_tokens = require_int(doc, "completion_tokens");
    if (entry.prompt_tokens < 0 || entry.completion_tokens < 0)
      throw ParseError("negative token count for key " + key.str());
    if (!cassette.entries_.emplace(key, std::move(entry)).second)
      throw InvariantError("duplicate cassette key " + key.str() + " in " +
                           path.string());
  }
  return cassette;
}

Cassette::Cassette(Cassette&& other) noexcept {
  std::unique_lock lock(other.mu_);
  entries_ = std::move(other.entries_);
  path_ = std::move(other.path_);
}

void Cassette::bind(const std::filesystem::path& path) {
  std::unique_lock lock(mu_);
  path_ = path;
}

std::optional<CassetteEntry> Cassette::find(const CassetteKey& key) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

namespace {
Json to_json(const CassetteKey& key, const CassetteEntry& e) {
  return Json{{"key", key.str()},
              {"model_id", e.model_id},
              {"text", e.text},
              {"prompt_tokens", e.prompt_tokens},
              {"completion_tokens", e.completion_tokens}};
}
}  // namespace

void Cassette::insert(const CassetteKey& key, CassetteEntry entry) {
  std::unique_lock lock(mu_);
  if (entries_.contains(key))
    throw InvariantError("duplicate cassette key " + key.str());
  if (path_) append_jsonl(*path_, to_json(key, entry));
  entries_.emplace(key, std::move(entry));
}

void Cassette::save(const std::filesystem::path& path) const {
  std::shared_lock lock(mu_);
  std::vector<Json> docs;
  docs.reserve(entries_.size());
  for (const auto& [key, entry] : entries_) docs.push_back(to_json(key, entry));
  write_jsonl(path, docs);
}

std::size_t Cassette::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::map<CassetteKey, CassetteEntry> Cassette::entries() const {
  std::shared_lock lock(mu_);
  return entries_;
}

}  // namespace pfuzz::llm
