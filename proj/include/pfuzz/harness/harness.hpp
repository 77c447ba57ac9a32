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

#ifndef PFUZZ_HARNESS_HARNESS_HPP_
#define PFUZZ_HARNESS_HARNESS_HPP_

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfuzz/common/jsonl.hpp"

namespace pfuzz::harness {

// A generated oracle reports a hit by printing exactly this line.
inline constexpr std::string_view kBugFoundMarker = "BUG FOUND";

struct TraceEntry {
  // assignment, attribute_assignment, index_assignment, unpacking, exception,
  // context_manager, condition_subexpr or call_chain_step
  std::string site_kind;
  std::string expression_text;
  std::string value_repr;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

enum class ExecStatus { kOk, kTimeout, kCrash };

std::string_view to_string(ExecStatus s);

struct ExecutionResult {
  ExecStatus status = ExecStatus::kOk;
  int exit_code = 0;
  std::optional<std::string> signal_name;  // "SIGSEGV", set iff status is crash
  std::string stdout_text;
  std::string stderr_text;
  bool bug_found = false;  // stdout has a line equal to kBugFoundMarker
  std::vector<TraceEntry> trace;
  double wall_time_seconds = 0;

  /// Fills bug_found from stdout and checks the status/signal pairing.
  /// Throws HarnessError when they disagree.
  void normalize();

  Json to_json() const;
  static ExecutionResult from_json(const Json& j);
  friend bool operator==(const ExecutionResult&, const ExecutionResult&) = default;
};

// The oracle fired (marker printed) or the process died on a signal.
inline bool oracle_fired(const ExecutionResult& r) {
  return r.bug_found || r.status == ExecStatus::kCrash;
}

// Trace rendered one entry per line for prompts and digests.
std::string format_trace(const std::vector<TraceEntry>& trace);

/// Access to the sidecar that can import the target library: list its
/// APIs, instrument programs, and run them in isolation. Implementations are
/// safe to call from several threads.
class Harness {
 public:
  virtual ~Harness() = default;
  // API payloads: {qualified_name, module_path, params:[{name, kind,
  // has_default}], doc_text}.
  virtual std::vector<Json> catalog(const std::string& library_ref) = 0;
  // Throws HarnessError on a syntax error.
  virtual std::string instrument(const std::string& program) = 0;
  virtual ExecutionResult execute(const std::string& program, double timeout_seconds) = 0;
};

/// Talks to a harness process over newline-delimited JSON on its stdin and
/// stdout, one request and one response at a time.
class ProcessHarness : public Harness {
 public:
  // argv[0] is looked up on PATH.
  explicit ProcessHarness(std::vector<std::string> argv);
  ~ProcessHarness() override;
  ProcessHarness(const ProcessHarness&) = delete;
  ProcessHarness& operator=(const ProcessHarness&) = delete;

  std::vector<Json> catalog(const std::string& library_ref) override;
  std::string instrument(const std::string& program) override;
  ExecutionResult execute(const std::string& program, double timeout_seconds) override;

  /// Raw exchange; throws HarnessError on I/O failure, a malformed reply or
  /// no reply within `deadline_seconds`.
  Json roundtrip(const Json& request, double deadline_seconds);

 private:
  struct Impl;
  Impl* impl_;
};

/// Scripted stand-in for the sidecar. Each rule maps a program substring to
/// a canned result; the first matching rule wins, else `default_result`.
///
/// File format (JSON):
///   {"catalog": [...api payloads...],
///    "rules": [{"match": "...", "result": {...}}],
///    "default": {...}}
class TranscriptHarness : public Harness {
 public:
  struct Rule {
    std::string match;
    ExecutionResult result;
  };

  TranscriptHarness(std::vector<Json> catalog, std::vector<Rule> rules,
                    ExecutionResult default_result);
  static std::unique_ptr<TranscriptHarness> load(const std::filesystem::path& path);
  Json to_json() const;

  std::vector<Json> catalog(const std::string& library_ref) override;
  // Identity: transcript programs are not rewritten.
  std::string instrument(const std::string& program) override;
  ExecutionResult execute(const std::string& program, double timeout_seconds) override;

  int executions() const;

 private:
  std::vector<Json> catalog_;
  std::vector<Rule> rules_;
  ExecutionResult default_;
  mutable std::mutex mu_;
  int executions_ = 0;
};

/// Answers requests read line by line from `in` on `out` until EOF. Bad
/// lines get {"status":"error"} and the loop continues.
void serve(Harness& harness, std::istream& in, std::ostream& out);

}  // namespace pfuzz::harness

#endif  // PFUZZ_HARNESS_HARNESS_HPP_
