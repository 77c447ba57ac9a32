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

#ifndef PFUZZ_COMMON_ERROR_HPP_
#define PFUZZ_COMMON_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pfuzz {

// Root of every error this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: files, LLM responses, wire messages.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A domain invariant was violated (duplicate keys, dimension mismatch, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Replay mode asked for a key the cassette does not contain.
class CassetteMissError : public Error {
 public:
  explicit CassetteMissError(const std::string& key)
      : Error("no cassette entry for key " + key), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// A live provider kept failing after the retry budget.
class ProviderError : public Error {
 public:
  using Error::Error;
};

// Spending cap reached; callers are expected to halt gracefully.
class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

// The execution sidecar could not be reached or answered nonsense.
class HarnessError : public Error {
 public:
  using Error::Error;
};

// Code-hosting service asked us to back off. `cursor` resumes the crawl.
class RateLimitedError : public Error {
 public:
  RateLimitedError(const std::string& what, int cursor)
      : Error(what), cursor_(cursor) {}
  int cursor() const { return cursor_; }

 private:
  int cursor_;
};

}  // namespace pfuzz

#endif  // PFUZZ_COMMON_ERROR_HPP_
