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

#ifndef PFUZZ_MATCHER_API_MATCHER_HPP_
#define PFUZZ_MATCHER_API_MATCHER_HPP_

#include <string>

#include "pfuzz/matcher/catalog.hpp"
#include "pfuzz/matcher/similarity.hpp"

namespace pfuzz::matcher {

// What the fuzzing loop asks of the matcher.
class ApiMatcher {
 public:
  virtual ~ApiMatcher() = default;
  virtual bool has_embedding(const std::string& api) const = 0;
  /// APIs most similar to `api`, best first. `api` itself may be included.
  /// Throws InvariantError when `api` has no embedding.
  virtual SimilarApiQueue similar(const std::string& api, std::size_t k) const = 0;
  // nullptr when the catalog lacks the API.
  virtual const ApiRecord* record(const std::string& api) const = 0;
};

class EmbeddingMatcher : public ApiMatcher {
 public:
  EmbeddingMatcher(Catalog catalog, EmbeddingDb<double> db)
      : catalog_(std::move(catalog)), db_(std::move(db)) {}

  bool has_embedding(const std::string& api) const override { return db_.contains(api); }
  SimilarApiQueue similar(const std::string& api, std::size_t k) const override {
    return similar_queue(api, db_.vector(api), db_, k);
  }
  const ApiRecord* record(const std::string& api) const override {
    return find_api(catalog_, api);
  }

  const Catalog& catalog() const { return catalog_; }
  const EmbeddingDb<double>& db() const { return db_; }

 private:
  Catalog catalog_;
  EmbeddingDb<double> db_;
};

}  // namespace pfuzz::matcher

#endif  // PFUZZ_MATCHER_API_MATCHER_HPP_
