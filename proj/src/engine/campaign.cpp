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

#include "pfuzz/engine/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <thread>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/text.hpp"

namespace pfuzz::engine {

namespace {

constexpr std::pair<TestOutcome, std::string_view> kOutcomeNames[] = {
    {TestOutcome::kNoBug, "no_bug"},
    {TestOutcome::kGenerationFailed, "generation_failed"},
    {TestOutcome::kRejected, "rejected"},
    {TestOutcome::kIncomplete, "incomplete"},
    {TestOutcome::kFinding, "finding"},
};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::vector<std::string> strings(const Json& j, const char* field) {
  try {
    return j.value(field, std::vector<std::string>{});
  } catch (const Json::exception&) {
    throw ParseError(std::string("field '") + field + "' must be a string array");
  }
}

// Directory-safe name for one test's artifacts.
std::string artifact_name(std::size_t index, int round, const std::string& api) {
  std::string safe;
  for (char c : api)
    safe.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ? c : '-');
  char prefix[32];
  std::snprintf(prefix, sizeof prefix, "%04zu-r%d-", index, round);
  return prefix + safe;
}

Json queue_json(const matcher::SimilarApiQueue& q) {
  Json entries = Json::array();
  for (const auto& e : q.entries) entries.push_back({{"api", e.api}, {"score", e.score}});
  return {{"anchor_api", q.anchor_api}, {"capacity", q.capacity}, {"entries", entries}};
}

matcher::SimilarApiQueue queue_from_json(const Json& j) {
  matcher::SimilarApiQueue q;
  q.anchor_api = require_string(j, "anchor_api");
  q.capacity = static_cast<std::size_t>(require_int(j, "capacity"));
  for (const auto& e : require_field(j, "entries"))
    q.entries.push_back({require_string(e, "api"), e.at("score").get<double>()});
  return q;
}

}  // namespace

void CampaignConfig::validate() const {
  if (window_size < 1) throw InvariantError("window_size must be positive");
  if (queue_depth < 1) throw InvariantError("queue_depth must be positive");
  if (expansion_count < 1) throw InvariantError("expansion_count must be positive");
  if (repeats < 1) throw InvariantError("repeats must be positive");
  if (!(timeout_seconds > 0)) throw InvariantError("timeout_seconds must be positive");
  if (max_tests_per_pattern < 1) throw InvariantError("max_tests_per_pattern must be positive");
  if (parallelism < 1) throw InvariantError("parallelism must be positive");
  if (budget && budget->units() <= 0) throw InvariantError("budget must be positive");
  if (window_size > queue_depth) throw InvariantError("window_size exceeds queue_depth");
}

Json CampaignConfig::to_json() const {
  Json j = {{"window_size", window_size},
            {"queue_depth", queue_depth},
            {"expansion_count", expansion_count},
            {"repeats", repeats},
            {"timeout_seconds", timeout_seconds},
            {"max_tests_per_pattern", max_tests_per_pattern},
            {"parallelism", parallelism}};
  j["budget"] = budget ? Json(budget->to_string()) : Json(nullptr);
  return j;
}

CampaignConfig CampaignConfig::from_json(const Json& j) {
  CampaignConfig c;
  try {
    c.window_size = j.value("window_size", c.window_size);
    c.queue_depth = j.value("queue_depth", c.queue_depth);
    c.expansion_count = j.value("expansion_count", c.expansion_count);
    c.repeats = j.value("repeats", c.repeats);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    c.max_tests_per_pattern = j.value("max_tests_per_pattern", c.max_tests_per_pattern);
    c.parallelism = j.value("parallelism", c.parallelism);
    if (j.contains("budget") && !j["budget"].is_null())
      c.budget = Money::parse(j["budget"].get<std::string>());
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed campaign config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string_view to_string(TestOutcome o) {
  for (const auto& [k, v] : kOutcomeNames)
    if (k == o) return v;
  return "unknown";
}

TestOutcome test_outcome_from_string(std::string_view s) {
  for (const auto& [k, v] : kOutcomeNames)
    if (v == s) return k;
  throw ParseError("unknown test outcome '" + std::string(s) + "'");
}

Json TestRecord::to_json() const {
  Json j = {{"round", round},
            {"target_api", target_api},
            {"outcome", std::string(engine::to_string(outcome))},
            {"detail", detail}};
  if (test) j["test"] = test->to_json();
  if (execution) j["execution"] = execution->to_json();
  if (verdict) j["verdict_id"] = verdict->candidate_id;
  return j;
}

Json Finding::to_json() const {
  return {{"source_issue", {{"repo", source_issue.repo}, {"number", source_issue.number}}},
          {"source_api", source_api},
          {"target_api", target_api},
          {"bug_category", std::string(pattern::to_string(bug_category))},
          {"oracle_kind", oracle_kind},
          {"program_source", program_source},
          {"verdict_id", verdict_id},
          {"trace_digest", trace_digest},
          {"round", round}};
}

Finding Finding::from_json(const Json& j) {
  Finding f;
  const Json& src = require_field(j, "source_issue");
  f.source_issue = {require_string(src, "repo"), static_cast<int>(require_int(src, "number"))};
  f.source_api = require_string(j, "source_api");
  f.target_api = require_string(j, "target_api");
  f.bug_category = pattern::normalize_category(require_string(j, "bug_category"));
  f.oracle_kind = j.value("oracle_kind", "");
  f.program_source = require_string(j, "program_source");
  f.verdict_id = j.value("verdict_id", "");
  f.trace_digest = j.value("trace_digest", "");
  f.round = static_cast<int>(j.value("round", 0));
  return f;
}

bool CampaignState::is_tested(const std::string& api) const { return contains(tested, api); }

void CampaignState::check() const {
  std::set<std::string> seen;
  for (const auto& t : tested)
    if (!seen.insert(t).second) throw InvariantError(t + " was tested twice");
  for (const auto& p : pending)
    if (seen.count(p)) throw InvariantError(p + " is pending but already tested");
  for (const auto& a : found_new_bug_api)
    if (!seen.count(a)) throw InvariantError(a + " is in the found set but was never tested");
  for (const auto& f : findings)
    if (!seen.count(f.target_api))
      throw InvariantError("finding for untested API " + f.target_api);
  if (tests_generated != tested.size())
    throw InvariantError("tests_generated does not match the tested list");
}

std::vector<std::string> next_batch(CampaignState& state, const CampaignConfig& config,
                                    const matcher::ApiMatcher& matcher) {
  const std::string& anchor = state.pattern.bug_api;
  std::vector<std::string> batch;
  auto admit = [&](const std::string& api) {
    if (api == anchor || state.is_tested(api) || contains(batch, api)) return false;
    batch.push_back(api);
    return true;
  };

  std::size_t taken = 0;
  for (const auto& e : state.api_queue.entries) {
    if (taken == config.window_size) break;
    if (admit(e.api)) ++taken;
  }

  // One expansion generation per round; expansions of expansions wait.
  std::vector<std::string> found;
  found.swap(state.found_new_bug_api);
  for (const auto& a : found) {
    if (!matcher.has_embedding(a)) continue;
    // The neighbour list may hold `a` and the anchor; ask for room to drop both.
    auto q = matcher.similar(a, config.expansion_count + 2);
    std::size_t kept = 0;
    for (const auto& e : q.entries) {
      if (e.api == a || e.api == anchor) continue;
      if (kept++ == config.expansion_count) break;
      admit(e.api);
    }
  }
  return batch;
}

void record_finding(CampaignState& state, const TransferredTest& test,
                    const harness::ExecutionResult& execution,
                    const validator::ValidationVerdict& verdict) {
  const std::string& api = test.target_api;
  if (state.is_tested(api)) throw InvariantError(api + " was already tested");
  state.tested.push_back(api);
  state.tests_generated = state.tested.size();
  std::erase(state.pending, api);
  if (!harness::oracle_fired(execution) || !verdict.final) return;
  Finding f;
  f.source_issue = state.pattern.source_issue;
  f.source_api = state.pattern.bug_api;
  f.target_api = api;
  // A transfer can turn a silent pattern into a crash; report what happened.
  f.bug_category = execution.status == harness::ExecStatus::kCrash ? pattern::BugCategory::kCrash
                                                                   : state.pattern.bug_category;
  f.oracle_kind = test.oracle_kind;
  f.program_source = test.program_source;
  f.verdict_id = verdict.candidate_id;
  f.trace_digest = sha256_hex(harness::format_trace(execution.trace));
  f.round = state.round;
  state.findings.push_back(std::move(f));
  state.found_new_bug_api.push_back(api);
}

Json CampaignSnapshot::to_json() const {
  Json findings = Json::array();
  for (const auto& f : state.findings) findings.push_back(f.to_json());
  return {{"version", std::string(kSnapshotVersion)},
          {"config", config.to_json()},
          {"cassette", cassette},
          {"state",
           {{"pattern", state.pattern.to_json()},
            {"api_queue", queue_json(state.api_queue)},
            {"tested", state.tested},
            {"found_new_bug_api", state.found_new_bug_api},
            {"pending", state.pending},
            {"findings", findings},
            {"round", state.round},
            {"init", state.init},
            {"tests_generated", state.tests_generated},
            {"halt_reason", state.halt_reason}}}};
}

CampaignSnapshot CampaignSnapshot::from_json(const Json& j) {
  const std::string version = j.value("version", "");
  if (version != kSnapshotVersion)
    throw InvariantError("snapshot version '" + version + "' is not " +
                         std::string(kSnapshotVersion));
  CampaignSnapshot s;
  s.config = CampaignConfig::from_json(require_field(j, "config"));
  s.cassette = j.value("cassette", "");
  const Json& st = require_field(j, "state");
  s.state.pattern = pattern::BugPattern::from_json(require_field(st, "pattern"));
  s.state.api_queue = queue_from_json(require_field(st, "api_queue"));
  s.state.tested = strings(st, "tested");
  s.state.found_new_bug_api = strings(st, "found_new_bug_api");
  s.state.pending = strings(st, "pending");
  for (const auto& f : st.value("findings", Json::array()))
    s.state.findings.push_back(Finding::from_json(f));
  s.state.round = static_cast<int>(require_int(st, "round"));
  s.state.init = st.value("init", false);
  s.state.tests_generated = static_cast<std::size_t>(require_int(st, "tests_generated"));
  s.state.halt_reason = st.value("halt_reason", "");
  s.state.check();
  return s;
}

void CampaignSnapshot::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file_atomic(path, to_json().dump(2) + "\n");
}

CampaignSnapshot CampaignSnapshot::load(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

Campaign::Campaign(CampaignContext context, pattern::BugPattern pattern, CampaignConfig config,
                   std::filesystem::path dir, std::string cassette_ref)
    : ctx_(context),
      config_(config),
      dir_(std::move(dir)),
      cassette_ref_(std::move(cassette_ref)),
      spent_at_start_(ctx_.gateway.ledger().total()) {
  config_.validate();
  state_.pattern = std::move(pattern);
  const std::string& anchor = state_.pattern.bug_api;
  state_.api_queue.anchor_api = anchor;
  state_.api_queue.capacity = config_.queue_depth;
  if (!ctx_.matcher.has_embedding(anchor)) {
    state_.halt_reason = std::string(halt::kAnchorNotEmbedded);
    return;
  }
  // One extra slot: the anchor is its own nearest neighbour.
  auto q = ctx_.matcher.similar(anchor, config_.queue_depth + 1);
  std::erase_if(q.entries, [&](const matcher::QueueEntry& e) { return e.api == anchor; });
  if (q.entries.size() > config_.queue_depth) q.entries.resize(config_.queue_depth);
  state_.api_queue = std::move(q);
  state_.api_queue.capacity = config_.queue_depth;
}

Campaign Campaign::resume(CampaignContext context, const pattern::BugPattern& pattern,
                          const std::filesystem::path& dir) {
  auto snap = CampaignSnapshot::load(dir / "snapshot.json");
  if (!(snap.state.pattern == pattern))
    throw InvariantError("snapshot in " + dir.string() + " belongs to another pattern (" +
                         snap.state.pattern.source_issue.str() + ")");
  Campaign c(context, pattern, snap.config, dir, snap.cassette);
  c.state_ = std::move(snap.state);
  return c;
}

TestRecord Campaign::run_one(const std::string& target, int round) {
  TestRecord rec;
  rec.round = round;
  rec.target_api = target;
  const matcher::ApiRecord* api = ctx_.matcher.record(target);
  if (!api) {
    rec.outcome = TestOutcome::kGenerationFailed;
    rec.detail = "no catalog record for " + target;
    return rec;
  }
  try {
    rec.test = transfer_bug(state_.pattern, *api, ctx_.gateway);
  } catch (const ParseError& e) {
    rec.outcome = TestOutcome::kGenerationFailed;
    rec.detail = e.what();
    return rec;
  }
  std::string program = ctx_.harness.instrument(rec.test->program_source);
  rec.execution = ctx_.harness.execute(program, config_.timeout_seconds);
  if (!harness::oracle_fired(*rec.execution)) {
    rec.outcome = TestOutcome::kNoBug;
    return rec;
  }
  rec.verdict = ctx_.validator.validate({ctx_.issue, state_.pattern, *rec.test, *rec.execution});
  rec.detail = rec.verdict->reason;
  rec.outcome = rec.verdict->final        ? TestOutcome::kFinding
                : rec.verdict->incomplete ? TestOutcome::kIncomplete
                                          : TestOutcome::kRejected;
  return rec;
}

void Campaign::write_artifacts(const TestRecord& rec, std::size_t index) const {
  if (dir_.empty()) return;
  const auto dir = dir_ / "tests" / artifact_name(index, rec.round, rec.target_api);
  std::filesystem::create_directories(dir);
  if (rec.test) {
    write_file_atomic(dir / "program.py", rec.test->program_source);
    write_file_atomic(dir / "test.json", rec.test->to_json().dump(2) + "\n");
  }
  if (rec.execution) write_file_atomic(dir / "result.json", rec.execution->to_json().dump(2) + "\n");
  if (rec.verdict) {
    write_file_atomic(dir / "verdict.json", rec.verdict->to_json().dump(2) + "\n");
    validator::append_verdict(dir_ / "verdicts.jsonl", *rec.verdict);
  }
  append_jsonl(dir_ / "tests.jsonl", rec.to_json());
}

void Campaign::save() const {
  if (dir_.empty()) return;
  CampaignSnapshot{config_, state_, cassette_ref_}.save(dir_ / "snapshot.json");
}

void Campaign::run(std::optional<int> max_rounds) {
  int rounds = 0;
  auto over_budget = [&] {
    if (!config_.budget) return false;
    return ctx_.gateway.ledger().total().units() - spent_at_start_.units() >=
           config_.budget->units();
  };
  while (!halted()) {
    if (max_rounds && rounds >= *max_rounds) return;
    if (state_.pending.empty()) {
      if (!state_.init && state_.found_new_bug_api.empty()) {
        state_.halt_reason = std::string(halt::kNoNewBugs);
        break;
      }
      if (state_.tests_generated >= config_.max_tests_per_pattern) {
        state_.halt_reason = std::string(halt::kMaxTests);
        break;
      }
      if (over_budget()) {
        state_.halt_reason = std::string(halt::kBudget);
        break;
      }
      state_.pending = next_batch(state_, config_, ctx_.matcher);
      state_.init = false;
      if (state_.pending.empty()) {
        state_.halt_reason = std::string(halt::kQueueExhausted);
        break;
      }
      const std::size_t room = config_.max_tests_per_pattern - state_.tests_generated;
      if (state_.pending.size() > room) state_.pending.resize(room);
      ++state_.round;
      save();
    }

    // Fan out; results are applied strictly in batch order.
    const std::vector<std::string> batch = state_.pending;
    std::vector<std::optional<TestRecord>> results(batch.size());
    std::vector<std::exception_ptr> errors(batch.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < batch.size();) {
        try {
          results[i] = run_one(batch[i], state_.round);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const int n = std::min<int>(config_.parallelism, static_cast<int>(batch.size()));
    if (n <= 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    }

    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (errors[i]) {
        save();
        try {
          std::rethrow_exception(errors[i]);
        } catch (const BudgetExceededError&) {
          state_.halt_reason = std::string(halt::kBudget);
          save();
          return;
        }
      }
      const TestRecord& rec = *results[i];
      if (rec.test && rec.execution) {
        validator::ValidationVerdict none;
        record_finding(state_, *rec.test, *rec.execution, rec.verdict ? *rec.verdict : none);
      } else {
        // Generation failures count as tested.
        state_.tested.push_back(rec.target_api);
        state_.tests_generated = state_.tested.size();
        std::erase(state_.pending, rec.target_api);
      }
      write_artifacts(rec, state_.tests_generated);
      records_.push_back(rec);
      if (on_test) on_test(rec);
    }
    state_.check();
    save();
    ++rounds;
  }
  save();
}

}  // namespace pfuzz::engine
