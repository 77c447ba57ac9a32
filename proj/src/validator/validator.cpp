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

#include "pfuzz/validator/validator.hpp"

#include <algorithm>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/field_block.hpp"
#include "pfuzz/common/text.hpp"
#include "pfuzz/llm/structured.hpp"

namespace pfuzz::validator {

namespace {

using Slots = std::map<std::string, std::string>;

// Thrown out of a stage when the gateway itself fails; carries the stage.
struct GatewayFailure {
  std::string stage;
  std::string what;
};

std::string or_none(const std::string& s) { return trim(s).empty() ? "(none)" : s; }

void record(EpochRecord& rec, llm::TemplateId id, const std::vector<std::string>& responses) {
  for (std::size_t i = 0; i < responses.size(); ++i)
    rec.exchanges.push_back(
        {std::string(llm::to_string(i == 0 ? id : llm::TemplateId::kFormatRepair)),
         sha256_hex(responses[i])});
}

// One structured question for one epoch. ParseError after the re-asks
// propagates to the caller, which counts it as a failed epoch.
template <typename Parse>
auto ask(llm::Gateway& gw, llm::TemplateId id, const Slots& slots, int epoch, EpochRecord& rec,
         Parse&& parse) {
  auto request = gw.make_request(id, slots);
  auto parsed = llm::ask_parsed(gw, request, parse, epoch);
  record(rec, id, parsed.responses);
  return parsed.value;
}

auto yes_no(std::string block, std::string field) {
  return [block = std::move(block), field = std::move(field)](const std::string& text) {
    return FieldBlock::parse(text, block).require_bool(field);
  };
}

/// Runs `epoch_fn` once per repeat and votes. Unusable answers fail the
/// epoch; gateway failures abort the stage.
template <typename Fn>
StageResult run_stage(std::string_view name, int repeats, Fn&& epoch_fn) {
  StageResult s;
  s.stage = std::string(name);
  for (int e = 0; e < repeats; ++e) {
    EpochRecord rec;
    rec.epoch = e;
    try {
      rec.result = epoch_fn(e, rec);
    } catch (const ParseError& err) {
      rec.result = false;
      if (!s.note.empty()) s.note += "; ";
      s.note += "epoch " + std::to_string(e) + ": " + err.what();
    } catch (const BudgetExceededError&) {
      throw;
    } catch (const CassetteMissError& err) {
      throw GatewayFailure{s.stage, err.what()};
    } catch (const ProviderError& err) {
      throw GatewayFailure{s.stage, err.what()};
    }
    s.epochs.push_back(std::move(rec));
  }
  s.passed = vote(s.results(), repeats);
  return s;
}

StageResult deterministic_stage(std::string_view name, int repeats, bool result,
                                std::string note) {
  StageResult s;
  s.stage = std::string(name);
  for (int e = 0; e < repeats; ++e) s.epochs.push_back({e, result, {}});
  s.passed = result;
  s.deterministic = true;
  s.note = std::move(note);
  return s;
}

std::string bug_type_labels() {
  std::string out;
  for (IrBugType t : kAllIrBugTypes) {
    if (!out.empty()) out += ", ";
    out += to_string(t);
  }
  return out;
}

Slots issue_slots(const corpus::IssueRecord& issue) {
  return {{"issue_title", issue.title},
          {"issue_body", or_none(issue.body)},
          {"issue_comments", pattern::format_comments(issue.comments)}};
}

Slots candidate_slots(const Candidate& c) {
  std::string trace = c.execution.trace.empty() ? std::string("(empty)")
                                                : harness::format_trace(c.execution.trace);
  std::string out = or_none(c.execution.stdout_text);
  if (c.execution.status != harness::ExecStatus::kOk) {
    out += "\n[status: " + std::string(harness::to_string(c.execution.status));
    if (c.execution.signal_name) out += ", signal " + *c.execution.signal_name;
    out += "]";
  }
  return {{"ir_catalog", ir_catalog_text()},
          {"bug_types", bug_type_labels()},
          {"bug_api", c.pattern.bug_api},
          {"triggering_context", c.pattern.triggering_context},
          {"oracle_design", c.pattern.oracle_design},
          {"original_program", c.pattern.repro_program},
          {"original_trace", "(not executed)"},
          {"target_api", c.test.target_api},
          {"adapted_context", c.test.adapted_context},
          {"adapted_oracle", c.test.adapted_oracle},
          {"program", c.test.program_source},
          {"transferred_program", c.test.program_source},
          {"stdout", out},
          {"trace", trace},
          {"transferred_trace", trace}};
}

Json epoch_json(const EpochRecord& e) {
  Json ex = Json::array();
  for (const auto& x : e.exchanges)
    ex.push_back({{"template_id", x.template_id}, {"response_sha256", x.response_sha256}});
  return {{"epoch", e.epoch}, {"result", e.result}, {"exchanges", ex}};
}

}  // namespace

bool vote(const std::vector<bool>& epoch_results, int repeats) {
  if (repeats < 1) throw InvariantError("repeats must be at least 1");
  if (epoch_results.size() != static_cast<std::size_t>(repeats))
    throw InvariantError("expected " + std::to_string(repeats) + " epoch results, got " +
                         std::to_string(epoch_results.size()));
  return std::all_of(epoch_results.begin(), epoch_results.end(), [](bool b) { return b; });
}

std::vector<bool> StageResult::results() const {
  std::vector<bool> out;
  for (const auto& e : epochs) out.push_back(e.result);
  return out;
}

const StageResult* ValidationVerdict::stage(std::string_view name) const {
  for (const auto& s : stages)
    if (s.stage == name) return &s;
  return nullptr;
}

Json ValidationVerdict::to_json() const {
  Json ss = Json::array();
  for (const auto& s : stages) {
    Json eps = Json::array();
    for (const auto& e : s.epochs) eps.push_back(epoch_json(e));
    ss.push_back({{"stage", s.stage},
                  {"epochs", eps},
                  {"passed", s.passed},
                  {"deterministic", s.deterministic},
                  {"note", s.note}});
  }
  Json j = {{"candidate_id", candidate_id}, {"stages", ss},     {"final", final},
            {"reason", reason},             {"incomplete", incomplete}};
  j["failure_stage"] = failure_stage ? Json(*failure_stage) : Json(nullptr);
  j["original_type"] = original_type ? Json(std::string(to_string(*original_type))) : Json(nullptr);
  j["transferred_type"] =
      transferred_type ? Json(std::string(to_string(*transferred_type))) : Json(nullptr);
  return j;
}

ValidationVerdict ValidationVerdict::from_json(const Json& j) {
  ValidationVerdict v;
  try {
    v.candidate_id = require_string(j, "candidate_id");
    for (const auto& s : require_field(j, "stages")) {
      StageResult r;
      r.stage = require_string(s, "stage");
      r.passed = s.at("passed").get<bool>();
      r.deterministic = s.value("deterministic", false);
      r.note = s.value("note", "");
      for (const auto& e : s.at("epochs")) {
        EpochRecord rec{e.at("epoch").get<int>(), e.at("result").get<bool>(), {}};
        for (const auto& x : e.value("exchanges", Json::array()))
          rec.exchanges.push_back({require_string(x, "template_id"),
                                   require_string(x, "response_sha256")});
        r.epochs.push_back(std::move(rec));
      }
      v.stages.push_back(std::move(r));
    }
    v.final = j.at("final").get<bool>();
    v.reason = j.value("reason", "");
    v.incomplete = j.value("incomplete", false);
    if (j.contains("failure_stage") && !j["failure_stage"].is_null())
      v.failure_stage = j["failure_stage"].get<std::string>();
    if (j.contains("original_type") && !j["original_type"].is_null())
      v.original_type = ir_type_from_string(j["original_type"].get<std::string>());
    if (j.contains("transferred_type") && !j["transferred_type"].is_null())
      v.transferred_type = ir_type_from_string(j["transferred_type"].get<std::string>());
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed verdict: ") + e.what());
  }
  bool all = !v.stages.empty() && std::all_of(v.stages.begin(), v.stages.end(),
                                              [](const StageResult& s) { return s.passed; });
  if (v.final && !all) throw InvariantError("verdict " + v.candidate_id + " is final with a failed stage");
  return v;
}

std::string candidate_id(const Candidate& c) {
  return c.pattern.source_issue.str() + " -> " + c.test.target_api;
}

Validator::Validator(llm::Gateway& gateway, ValidatorOptions options)
    : gateway_(gateway), options_(options) {
  if (options_.repeats < 1) throw InvariantError("repeats must be at least 1");
}

std::pair<Suitability, StageResult> Validator::assess_issue_suitability(
    const corpus::IssueRecord& issue) {
  const std::string key = issue.ref().str();
  {
    std::lock_guard lock(mu_);
    if (auto it = suitability_cache_.find(key); it != suitability_cache_.end()) return it->second;
  }
  const Slots slots = issue_slots(issue);
  constexpr llm::TemplateId kChecks[] = {
      llm::TemplateId::kIssueApiRelevance, llm::TemplateId::kIssueDemo,
      llm::TemplateId::kIssueFeedback, llm::TemplateId::kIssueComplexity};
  bool flags[4] = {true, true, true, true};
  StageResult s = run_stage(stage::kIssueSuitability, options_.repeats,
                            [&](int epoch, EpochRecord& rec) {
                              bool all = true;
                              for (int k = 0; k < 4; ++k) {
                                bool ok = false;
                                try {
                                  ok = ask(gateway_, kChecks[k], slots, epoch, rec,
                                           yes_no("VERDICT", "passes"));
                                } catch (const ParseError&) {
                                  ok = false;
                                }
                                flags[k] = flags[k] && ok;
                                all = all && ok;
                              }
                              return all;
                            });
  Suitability out{flags[0], flags[1], flags[2], flags[3]};
  std::lock_guard lock(mu_);
  return suitability_cache_.emplace(key, std::make_pair(out, s)).first->second;
}

std::string Validator::extract_criteria(const corpus::IssueRecord& issue,
                                        const std::string& bug_api) {
  const std::string key = issue.ref().str();
  {
    std::lock_guard lock(mu_);
    if (auto it = criteria_cache_.find(key); it != criteria_cache_.end()) return it->second;
  }
  Slots slots = issue_slots(issue);
  slots["bug_api"] = bug_api;
  std::string text;
  try {
    auto request = gateway_.make_request(llm::TemplateId::kCriteriaExtraction, slots);
    text = trim(llm::ask_parsed(gateway_, request, [](const std::string& r) {
                  return FieldBlock::parse(r, "CRITERIA").require("criteria");
                }).value);
  } catch (const ParseError&) {
    text.clear();
  }
  std::lock_guard lock(mu_);
  return criteria_cache_.emplace(key, text).first->second;
}

ValidationVerdict Validator::validate(const Candidate& c) {
  ValidationVerdict v;
  v.candidate_id = candidate_id(c);
  if (!c.execution.bug_found && c.execution.status != harness::ExecStatus::kCrash)
    throw InvariantError("validating " + v.candidate_id + " whose oracle never fired");
  const int n = options_.repeats;
  const Slots slots = candidate_slots(c);

  // Records `s`; false means the pipeline stops here.
  auto push = [&](StageResult s, std::string reason_if_failed) {
    bool ok = s.passed;
    v.stages.push_back(std::move(s));
    if (!ok) {
      v.failure_stage = v.stages.back().stage;
      v.reason = std::move(reason_if_failed);
    }
    return ok;
  };

  try {
    const bool signal_crash =
        c.execution.status == harness::ExecStatus::kCrash &&
        match_ir(execution_facts(c.test.target_api, c.execution), IrBugType::kExecutionCrash);

    // Symptom similarity.
    if (signal_crash) {
      v.transferred_type = IrBugType::kExecutionCrash;
      if (c.pattern.bug_category == pattern::BugCategory::kCrash)
        v.original_type = IrBugType::kExecutionCrash;
      push(deterministic_stage(stage::kSameBugType, n, true, "signal crash matches Execution_Crash"),
           "");
      push(deterministic_stage(stage::kSameBugPattern, n, true,
                               "crash oracle is general; no pattern comparison needed"),
           "");
    } else {
      std::vector<std::pair<IrBugType, IrBugType>> labels(static_cast<std::size_t>(n));
      StageResult type_stage =
          run_stage(stage::kSameBugType, n, [&](int epoch, EpochRecord& rec) {
            auto pair = ask(gateway_, llm::TemplateId::kSameBugType, slots, epoch, rec,
                            [](const std::string& text) {
                              FieldBlock b = FieldBlock::parse(text, "VERDICT");
                              return std::make_pair(ir_type_from_string(b.require("original_type")),
                                                    ir_type_from_string(b.require("transferred_type")));
                            });
            labels[static_cast<std::size_t>(epoch)] = pair;
            return pair.first == pair.second;
          });
      // Labels from the first epoch decide the route.
      if (!type_stage.epochs.empty() && !type_stage.epochs.front().exchanges.empty()) {
        v.original_type = labels.front().first;
        v.transferred_type = labels.front().second;
      }
      if (!push(std::move(type_stage), "the transferred case is a different bug type"))
        return v;

      if (is_mismatch_type(*v.transferred_type)) {
        if (!push(run_stage(stage::kRealMismatch, n,
                            [&](int epoch, EpochRecord& rec) {
                              return ask(gateway_, llm::TemplateId::kRealMismatch, slots, epoch,
                                         rec, yes_no("VERDICT", "real_mismatch"));
                            }),
                  "the reported difference is not a genuine mismatch"))
          return v;
      } else {
        if (!push(run_stage(stage::kSameBugPattern, n,
                            [&](int epoch, EpochRecord& rec) {
                              return ask(gateway_, llm::TemplateId::kSameBugPattern, slots, epoch,
                                         rec, yes_no("VERDICT", "same_pattern"));
                            }),
                  "the transferred case encodes a different bug pattern"))
          return v;
      }
    }

    // Reverse hypothesis: a sound oracle never fires on a correct API.
    if (!push(run_stage(stage::kOracleCorrectness, n,
                        [&](int epoch, EpochRecord& rec) {
                          return ask(gateway_, llm::TemplateId::kBugFreeVerification, slots,
                                     epoch, rec, yes_no("VERDICT", "oracle_sound"));
                        }),
              "the oracle would fire on a correct implementation"))
      return v;

    auto [suitable, suit_stage] = assess_issue_suitability(c.issue);
    if (!push(std::move(suit_stage), std::string(kUnverifiableReason))) return v;

    std::string criteria = extract_criteria(c.issue, c.pattern.bug_api);
    if (criteria.empty()) {
      StageResult s;
      s.stage = std::string(stage::kCriteriaJudgment);
      s.note = "criteria extraction returned nothing";
      push(std::move(s), std::string(kUnverifiableReason));
      return v;
    }
    Slots judge = slots;
    judge["criteria"] = criteria;
    if (!push(run_stage(stage::kCriteriaJudgment, n,
                        [&](int epoch, EpochRecord& rec) {
                          auto first = gateway_.make_request(llm::TemplateId::kRealBug, judge);
                          auto opinion = llm::ask_parsed(
                              gateway_, first,
                              [](const std::string& t) {
                                FieldBlock::parse(t, "VERDICT").require_bool("real_bug");
                                return t;
                              },
                              epoch);
                          record(rec, llm::TemplateId::kRealBug, opinion.responses);
                          std::string previous = first.rendered_prompt + "\n\n" + opinion.value;
                          std::string challenge =
                              ask(gateway_, llm::TemplateId::kDebateChallenge,
                                  {{"previous", previous}}, epoch, rec,
                                  [](const std::string& t) {
                                    return FieldBlock::parse(t, "CHALLENGE").require("challenge");
                                  });
                          bool false_positive =
                              ask(gateway_, llm::TemplateId::kDebateSummary,
                                  {{"previous", previous}, {"challenge", challenge}}, epoch, rec,
                                  yes_no("VERDICT", "false_positive"));
                          return !false_positive;
                        }),
              "judged a false positive under the issue's bug criteria"))
      return v;

    v.final = true;
    v.reason = "passed all stages";
  } catch (const GatewayFailure& f) {
    v.final = false;
    v.incomplete = true;
    v.failure_stage = f.stage;
    v.reason = "incomplete: " + f.what;
  }
  return v;
}

void append_verdict(const std::filesystem::path& path, const ValidationVerdict& verdict) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  append_jsonl(path, verdict.to_json());
}

std::vector<ValidationVerdict> load_verdicts(const std::filesystem::path& path) {
  std::vector<ValidationVerdict> out;
  if (!std::filesystem::exists(path)) return out;
  for (const auto& doc : read_jsonl(path)) out.push_back(ValidationVerdict::from_json(doc));
  return out;
}

}  // namespace pfuzz::validator
