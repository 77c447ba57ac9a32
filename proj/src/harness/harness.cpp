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

#include "pfuzz/harness/harness.hpp"

#include <istream>
#include <ostream>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/text.hpp"

namespace pfuzz::harness {

std::string_view to_string(ExecStatus s) {
  switch (s) {
    case ExecStatus::kOk: return "ok";
    case ExecStatus::kTimeout: return "timeout";
    case ExecStatus::kCrash: return "crash";
  }
  return "?";
}

void ExecutionResult::normalize() {
  if ((status == ExecStatus::kCrash) != signal_name.has_value())
    throw HarnessError("status '" + std::string(to_string(status)) +
                       "' disagrees with signal_name presence");
  bug_found = has_exact_line(stdout_text, kBugFoundMarker);
}

Json ExecutionResult::to_json() const {
  Json t = Json::array();
  for (const auto& e : trace)
    t.push_back({{"site_kind", e.site_kind},
                 {"expression_text", e.expression_text},
                 {"value_repr", e.value_repr}});
  return {{"status", to_string(status)},
          {"exit_code", exit_code},
          {"signal_name", signal_name ? Json(*signal_name) : Json(nullptr)},
          {"stdout", stdout_text},
          {"stderr", stderr_text},
          {"bug_found", bug_found},
          {"trace", t},
          {"wall_time_seconds", wall_time_seconds}};
}

ExecutionResult ExecutionResult::from_json(const Json& j) {
  ExecutionResult r;
  const std::string status = require_string(j, "status");
  if (status == "ok") {
    r.status = ExecStatus::kOk;
  } else if (status == "timeout") {
    r.status = ExecStatus::kTimeout;
  } else if (status == "crash") {
    r.status = ExecStatus::kCrash;
  } else {
    throw ParseError("unknown execution status '" + status + "'");
  }
  r.exit_code = static_cast<int>(j.value("exit_code", 0));
  if (j.contains("signal_name") && !j["signal_name"].is_null())
    r.signal_name = j["signal_name"].get<std::string>();
  r.stdout_text = j.value("stdout", "");
  r.stderr_text = j.value("stderr", "");
  r.bug_found = j.value("bug_found", false);
  r.wall_time_seconds = j.value("wall_time_seconds", 0.0);
  if (j.contains("trace")) {
    for (const auto& e : j["trace"])
      r.trace.push_back({require_string(e, "site_kind"), require_string(e, "expression_text"),
                         require_string(e, "value_repr")});
  }
  return r;
}

std::string format_trace(const std::vector<TraceEntry>& trace) {
  if (trace.empty()) return "(empty)";
  std::string out;
  for (const auto& e : trace) out += "[" + e.site_kind + "] " + e.expression_text + " = " + e.value_repr + "\n";
  return out;
}

TranscriptHarness::TranscriptHarness(std::vector<Json> catalog, std::vector<Rule> rules,
                                     ExecutionResult default_result)
    : catalog_(std::move(catalog)), rules_(std::move(rules)), default_(std::move(default_result)) {
  for (auto& r : rules_) r.result.normalize();
  default_.normalize();
}

std::unique_ptr<TranscriptHarness> TranscriptHarness::load(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  std::vector<Json> catalog;
  if (doc.contains("catalog")) catalog = doc["catalog"].get<std::vector<Json>>();
  std::vector<Rule> rules;
  if (doc.contains("rules"))
    for (const auto& r : doc["rules"])
      rules.push_back({require_string(r, "match"), ExecutionResult::from_json(require_field(r, "result"))});
  ExecutionResult def;
  if (doc.contains("default")) def = ExecutionResult::from_json(doc["default"]);
  return std::make_unique<TranscriptHarness>(std::move(catalog), std::move(rules), std::move(def));
}

Json TranscriptHarness::to_json() const {
  Json rules = Json::array();
  for (const auto& r : rules_) rules.push_back({{"match", r.match}, {"result", r.result.to_json()}});
  return {{"catalog", catalog_}, {"rules", rules}, {"default", default_.to_json()}};
}

std::vector<Json> TranscriptHarness::catalog(const std::string&) { return catalog_; }

std::string TranscriptHarness::instrument(const std::string& program) {
  if (!delimiters_balanced(program)) throw HarnessError("syntax error: unbalanced delimiters");
  return program;
}

ExecutionResult TranscriptHarness::execute(const std::string& program, double) {
  {
    std::lock_guard lock(mu_);
    ++executions_;
  }
  for (const auto& r : rules_)
    if (program.find(r.match) != std::string::npos) return r.result;
  return default_;
}

int TranscriptHarness::executions() const {
  std::lock_guard lock(mu_);
  return executions_;
}

void serve(Harness& harness, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    Json response;
    try {
      Json req = Json::parse(line);
      const std::string action = require_string(req, "action");
      if (action == "catalog") {
        response = {{"status", "ok"}, {"apis", harness.catalog(require_string(req, "library_ref"))}};
      } else if (action == "instrument") {
        response = {{"status", "ok"}, {"program", harness.instrument(require_string(req, "program"))}};
      } else if (action == "execute") {
        double timeout = req.value("timeout_seconds", 0.0);
        if (timeout <= 0) throw ParseError("timeout_seconds must be positive");
        response = harness.execute(require_string(req, "program"), timeout).to_json();
      } else {
        throw ParseError("unknown action '" + action + "'");
      }
    } catch (const std::exception& e) {
      response = {{"status", "error"}, {"error", e.what()}};
    }
    out << response.dump() << '\n' << std::flush;
  }
}

}  // namespace pfuzz::harness
