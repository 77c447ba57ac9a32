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

#ifndef PFUZZ_MATCHER_CATALOG_HPP_
#define PFUZZ_MATCHER_CATALOG_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pfuzz/common/jsonl.hpp"
#include "pfuzz/harness/harness.hpp"
#include "pfuzz/llm/gateway.hpp"
#include "pfuzz/matcher/similarity.hpp"

namespace pfuzz::matcher {

struct Param {
  std::string name;
  std::string kind;  // POSITIONAL_ONLY, KEYWORD_ONLY, VAR_POSITIONAL, ...
  bool has_default = false;
  friend bool operator==(const Param&, const Param&) = default;
};

struct ApiRecord {
  std::string qualified_name;
  std::string module_path;
  std::vector<Param> params;
  std::string doc_text;  // may be empty

  // "(a, b=..., *args, **kw)"
  std::string signature() const;
  Json to_json() const;
  static ApiRecord from_json(const Json& j);
  friend bool operator==(const ApiRecord&, const ApiRecord&) = default;
};

// Sorted by qualified_name, names unique.
using Catalog = std::vector<ApiRecord>;

/// Asks the harness to scan `library_ref` and returns the payloads as
/// records, deduplicated by name (first wins) and sorted.
Catalog build_catalog(harness::Harness& harness, const std::string& library_ref);

void save_catalog(const std::filesystem::path& path, const Catalog& catalog);
// Throws InvariantError on a repeated name.
Catalog load_catalog(const std::filesystem::path& path);
const ApiRecord* find_api(const Catalog& catalog, const std::string& name);

struct FunctionalDescription {
  std::string api;
  std::string description_text;
  friend bool operator==(const FunctionalDescription&, const FunctionalDescription&) = default;
};

/// Context-free description of what the API computes, for embedding.
/// Throws ParseError when no usable description comes back after re-asks.
FunctionalDescription describe_api(const ApiRecord& record, llm::Gateway& gateway);

void save_descriptions(const std::filesystem::path& path,
                       const std::vector<FunctionalDescription>& descriptions);
std::vector<FunctionalDescription> load_descriptions(const std::filesystem::path& path);

/// Embeds every description in batches of `batch_size` and collects the
/// vectors into a database keyed by API name.
EmbeddingDb<double> embed_descriptions(const std::vector<FunctionalDescription>& descriptions,
                                       llm::Gateway& gateway, std::size_t batch_size = 64);

}  // namespace pfuzz::matcher

#endif  // PFUZZ_MATCHER_CATALOG_HPP_
