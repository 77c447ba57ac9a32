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

#ifndef PFUZZ_CLI_APP_HPP_
#define PFUZZ_CLI_APP_HPP_

#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "pfuzz/corpus/records.hpp"
#include "pfuzz/llm/provider.hpp"

namespace pfuzz::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;  // so CI can gate on new bugs
inline constexpr int kExitError = 2;

/// Files one workspace directory (--out) holds, in pipeline order.
struct Workspace {
  std::filesystem::path root;

  std::filesystem::path corpus() const { return root / "corpus"; }
  std::filesystem::path patterns() const { return root / "patterns.jsonl"; }
  std::filesystem::path catalog() const { return root / "catalog.jsonl"; }
  std::filesystem::path descriptions() const { return root / "descriptions.jsonl"; }
  std::filesystem::path embeddings() const { return root / "embeddings.jsonl"; }
  std::filesystem::path pilot() const { return root / "pilot"; }
  std::filesystem::path campaigns() const { return root / "campaigns"; }
  std::filesystem::path report() const { return root / "report"; }
  std::filesystem::path ledger() const { return root / "ledger.jsonl"; }
  // campaigns/<owner>-<repo>-<n>
  std::filesystem::path campaign(const corpus::IssueRef& source) const;
};

// "owner/repo#123". Throws ParseError.
corpus::IssueRef parse_issue_ref(const std::string& text);

// Stand-ins for the network providers, for tests and offline recording.
struct Providers {
  std::shared_ptr<llm::ChatProvider> chat;
  std::shared_ptr<llm::EmbeddingProvider> embeddings;
};

/// The whole command line, minus the program name. Returns the exit code;
/// nothing is thrown. With `providers`, live and record mode use them
/// instead of the configured endpoint.
int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const Providers* providers = nullptr);

}  // namespace pfuzz::cli

#endif  // PFUZZ_CLI_APP_HPP_
