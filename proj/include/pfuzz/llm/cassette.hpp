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

#ifndef PFUZZ_LLM_CASSETTE_HPP_
#define PFUZZ_LLM_CASSETTE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "pfuzz/llm/types.hpp"

namespace pfuzz::llm {

/// (template, content hash of the rendered prompt, epoch). Content hashes do
/// not drift when prompts are renumbered; the epoch lets repeated validation
/// prompts carry distinct answers.
struct CassetteKey {
  std::string template_id;
  std::string prompt_sha256;
  int epoch = 0;

  static CassetteKey of(TemplateId id, std::string_view rendered_prompt, int epoch);
  // "template_id:sha256:epoch"
  std::string str() const;
  static CassetteKey parse(std::string_view s);

  friend auto operator<=>(const CassetteKey&, const CassetteKey&) = default;
};

struct CassetteEntry {
  std::string model_id;
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  friend bool operator==(const CassetteEntry&, const CassetteEntry&) = default;
};

/// Recorded key -> response map, persisted as line-delimited JSON with the
/// fields key, model_id, text, prompt_tokens, completion_tokens.
///
/// Lookups and inserts are thread-safe. When bound to a file, inserts are
/// appended to it immediately so a crashed recording keeps what it paid for.
class Cassette {
 public:
  Cassette() = default;
  Cassette(Cassette&& other) noexcept;
  Cassette& operator=(Cassette&&) = delete;

  /// Throws ParseError on a malformed line and InvariantError on a repeated
  /// key.
  static Cassette load(const std::filesystem::path& path);

  // Subsequent inserts append to `path`.
  void bind(const std::filesystem::path& path);
  const std::optional<std::filesystem::path>& path() const { return path_; }

  std::optional<CassetteEntry> find(const CassetteKey& key) const;
  // Throws InvariantError if the key is already present.
  void insert(const CassetteKey& key, CassetteEntry entry);
  // Writes every entry, sorted by key, to `path`.
  void save(const std::filesystem::path& path) const;

  std::size_t size() const;
  std::map<CassetteKey, CassetteEntry> entries() const;

 private:
  mutable std::shared_mutex mu_;
  std::map<CassetteKey, CassetteEntry> entries_;
  std::optional<std::filesystem::path> path_;
};

}  // namespace pfuzz::llm

#endif  // PFUZZ_LLM_CASSETTE_HPP_
