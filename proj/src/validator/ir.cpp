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

#include "pfuzz/validator/ir.hpp"

#include <algorithm>
#include <functional>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/text.hpp"

namespace pfuzz::validator {

namespace {

constexpr std::pair<IrBugType, std::string_view> kTypeNames[] = {
    {IrBugType::kDeviceInconsistency, "Device_Inconsistency"},
    {IrBugType::kJitEagerMismatch, "JIT_Eager_Mismatch"},
    {IrBugType::kCompileEagerMismatch, "Compile_Eager_Mismatch"},
    {IrBugType::kFunctionalDefect, "Functional_Defect"},
    {IrBugType::kExecutionCrash, "Execution_Crash"},
    {IrBugType::kPrecisionDegradation, "Precision_Degradation"},
    {IrBugType::kSecurityRisk, "Security_Risk"},
};

constexpr std::pair<FactKind, std::string_view> kKindNames[] = {
    {FactKind::kVarDef, "VarDef"},
    {FactKind::kApiCall, "APICall"},
    {FactKind::kOracleCheck, "OracleCheck"},
    {FactKind::kControlBlock, "ControlBlock"},
    {FactKind::kFault, "Fault"},
};

using Facts = std::vector<TraceFact>;

std::string attr(const TraceFact& f, const std::string& key) {
  auto it = f.attrs.find(key);
  return it == f.attrs.end() ? std::string() : it->second;
}

// "cpu" matches "cpu" and "cpu:0".
bool on_device(const TraceFact& f, std::string_view family) {
  if (f.kind != FactKind::kVarDef || f.type != "tensor" || f.binding.empty()) return false;
  std::string d = to_lower(attr(f, "device"));
  return d == family || (d.size() > family.size() && d.starts_with(family) &&
                         d[family.size()] == ':');
}

bool in_mode(const TraceFact& f, std::initializer_list<std::string_view> modes) {
  if (f.kind != FactKind::kApiCall || f.binding.empty()) return false;
  std::string m = attr(f, "mode");
  return std::find(modes.begin(), modes.end(), m) != modes.end();
}

bool is_check(const TraceFact& f, std::string_view type, std::string_view condition,
              std::string_view outcome) {
  return f.kind == FactKind::kOracleCheck && f.type == type && f.condition == condition &&
         f.outcome == outcome;
}

// Compare(a, b) in either operand order.
bool compares(const TraceFact& check, const std::string& a, const std::string& b) {
  if (check.operands.size() != 2) return false;
  return (check.operands[0] == a && check.operands[1] == b) ||
         (check.operands[0] == b && check.operands[1] == a);
}

bool any_of(const Facts& facts, const std::function<bool(const TraceFact&)>& pred) {
  return std::any_of(facts.begin(), facts.end(), pred);
}

// Two environments producing values that a failing Compare puts side by side.
bool cross_env(const Facts& facts, const std::function<bool(const TraceFact&)>& left,
               const std::function<bool(const TraceFact&)>& right, bool same_api) {
  for (const auto& a : facts) {
    if (!left(a)) continue;
    for (const auto& b : facts) {
      if (&a == &b || !right(b) || a.binding == b.binding) continue;
      if (same_api && a.api != b.api) continue;
      if (any_of(facts, [&](const TraceFact& c) {
            return is_check(c, "ValueCorrectness", "Compare", "FAIL") &&
                   compares(c, a.binding, b.binding);
          }))
        return true;
    }
  }
  return false;
}

bool functional_defect(const Facts& facts) {
  static const std::vector<std::string> allowed = {"dtype", "shape", "numerical"};
  for (const auto& call : facts) {
    if (call.kind != FactKind::kApiCall || call.binding.empty()) continue;
    if (any_of(facts, [&](const TraceFact& c) {
          if (!is_check(c, "ValueCorrectness", "MatchValue", "MISMATCH")) return false;
          if (c.operands.size() != 2 || c.operands[0] != call.binding) return false;
          if (c.criteria.empty()) return false;
          return std::all_of(c.criteria.begin(), c.criteria.end(), [&](const std::string& k) {
            return std::find(allowed.begin(), allowed.end(), k) != allowed.end();
          });
        }))
      return true;
  }
  return false;
}

bool crash_fault(const std::string& kind) {
  return std::find(std::begin(kCrashFaults), std::end(kCrashFaults), kind) !=
         std::end(kCrashFaults);
}

bool execution_crash(const Facts& facts) {
  for (const auto& call : facts) {
    if (call.kind != FactKind::kApiCall || call.binding.empty()) continue;
    const std::string& fault = call.binding;
    auto refers = [&](const TraceFact& f) {
      return std::find(f.operands.begin(), f.operands.end(), fault) != f.operands.end();
    };
    if (any_of(facts, [&](const TraceFact& f) {
          if (f.kind == FactKind::kFault) return refers(f) && crash_fault(f.fault_kind);
          return is_check(f, "ExceptionType", "FaultType", "TRIGGERED") && refers(f) &&
                 crash_fault(f.fault_kind);
        }))
      return true;
  }
  return false;
}

bool precision_degradation(const Facts& facts) {
  for (const auto& call : facts) {
    if (call.kind != FactKind::kApiCall || call.binding.empty()) continue;
    if (any_of(facts, [&](const TraceFact& c) {
          return is_check(c, "ValueCorrectness", "Compare", "FAIL") && c.operands.size() == 2 &&
                 c.operands[0] == call.binding && c.tolerance == kPrecisionTolerance;
        }))
      return true;
  }
  return false;
}

bool security_risk(const Facts& facts) {
  bool sensitive = any_of(facts, [](const TraceFact& f) {
    return (f.kind == FactKind::kVarDef || f.kind == FactKind::kApiCall ||
            f.kind == FactKind::kControlBlock) &&
           attr(f, "security_sensitive") == "true";
  });
  if (!sensitive) return false;
  return any_of(facts, [](const TraceFact& c) {
    std::string sev = attr(c, "severity");
    return is_check(c, "SecurityViolation", "SecurityPolicyCheck", "VIOLATION_DETECTED") &&
           !attr(c, "violation_type").empty() &&
           (sev == "high" || sev == "medium" || sev == "low");
  });
}

}  // namespace

std::string_view to_string(IrBugType t) {
  for (const auto& [k, v] : kTypeNames)
    if (k == t) return v;
  return "unknown";
}

IrBugType ir_type_from_string(std::string_view label) {
  std::string l = to_lower(trim(label));
  for (const auto& [k, v] : kTypeNames)
    if (to_lower(v) == l) return k;
  throw ParseError("unknown bug type '" + std::string(label) + "'");
}

bool is_mismatch_type(IrBugType t) {
  return t == IrBugType::kDeviceInconsistency || t == IrBugType::kJitEagerMismatch ||
         t == IrBugType::kCompileEagerMismatch;
}

std::string_view to_string(FactKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "unknown";
}

FactKind fact_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kKindNames)
    if (name == s) return kind;
  throw ParseError("unknown fact kind '" + std::string(s) + "'");
}

Json TraceFact::to_json() const {
  Json j = {{"kind", std::string(validator::to_string(kind))}};
  if (!type.empty()) j["type"] = type;
  if (!api.empty()) j["api"] = api;
  if (!attrs.empty()) j["attrs"] = attrs;
  if (!binding.empty()) j["binding"] = binding;
  if (!condition.empty()) j["condition"] = condition;
  if (!operands.empty()) j["operands"] = operands;
  if (tolerance) j["tolerance"] = {{"abs", tolerance->abs}, {"rel", tolerance->rel}};
  if (!criteria.empty()) j["criteria"] = criteria;
  if (!fault_kind.empty()) j["fault_kind"] = fault_kind;
  if (!outcome.empty()) j["outcome"] = outcome;
  return j;
}

TraceFact TraceFact::from_json(const Json& j) {
  TraceFact f;
  f.kind = fact_kind_from_string(require_string(j, "kind"));
  try {
    f.type = j.value("type", "");
    f.api = j.value("api", "");
    if (j.contains("attrs")) f.attrs = j["attrs"].get<std::map<std::string, std::string>>();
    f.binding = j.value("binding", "");
    f.condition = j.value("condition", "");
    if (j.contains("operands")) f.operands = j["operands"].get<std::vector<std::string>>();
    if (j.contains("tolerance"))
      f.tolerance = Tolerance{j["tolerance"].at("abs").get<double>(),
                              j["tolerance"].at("rel").get<double>()};
    if (j.contains("criteria")) f.criteria = j["criteria"].get<std::vector<std::string>>();
    f.fault_kind = j.value("fault_kind", "");
    f.outcome = j.value("outcome", "");
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed trace fact: ") + e.what());
  }
  if (f.kind == FactKind::kOracleCheck && f.condition.empty())
    throw ParseError("oracle check without a condition");
  return f;
}

bool match_ir(const std::vector<TraceFact>& facts, IrBugType type) {
  switch (type) {
    case IrBugType::kDeviceInconsistency:
      return cross_env(
          facts, [](const TraceFact& f) { return on_device(f, "cpu"); },
          [](const TraceFact& f) { return on_device(f, "cuda"); }, false);
    case IrBugType::kJitEagerMismatch:
      return cross_env(
          facts, [](const TraceFact& f) { return in_mode(f, {"eager"}); },
          [](const TraceFact& f) { return in_mode(f, {"jit_trace", "jit_script"}); }, true);
    case IrBugType::kCompileEagerMismatch:
      return cross_env(
          facts, [](const TraceFact& f) { return in_mode(f, {"eager"}); },
          [](const TraceFact& f) { return in_mode(f, {"compile(fx)", "compile(dynamo)"}); },
          true);
    case IrBugType::kFunctionalDefect:
      return functional_defect(facts);
    case IrBugType::kExecutionCrash:
      return execution_crash(facts);
    case IrBugType::kPrecisionDegradation:
      return precision_degradation(facts);
    case IrBugType::kSecurityRisk:
      return security_risk(facts);
  }
  return false;
}

std::string fault_kind_for_signal(std::string_view signal_name) {
  if (signal_name == "SIGSEGV") return "SegFault";
  if (signal_name == "SIGFPE") return "FloatingPointException";
  if (signal_name == "SIGABRT") return "Aborted";
  return std::string(signal_name);
}

std::vector<TraceFact> execution_facts(const std::string& target_api,
                                       const harness::ExecutionResult& result) {
  std::vector<TraceFact> facts;
  TraceFact call;
  call.kind = FactKind::kApiCall;
  call.api = target_api;
  call.attrs["mode"] = "eager";
  if (result.status == harness::ExecStatus::kCrash && result.signal_name) {
    call.binding = "fault";
    facts.push_back(call);
    TraceFact fault;
    fault.kind = FactKind::kFault;
    fault.operands = {"fault"};
    fault.fault_kind = fault_kind_for_signal(*result.signal_name);
    facts.push_back(fault);
  } else {
    call.binding = "v";
    facts.push_back(call);
  }
  return facts;
}

std::string ir_catalog_text() {
  return R"(Device_Inconsistency ::=
  VarDef(tensor)[device=cpu:*] -> v_cpu AND
  VarDef(tensor)[device=cuda:*] -> v_gpu AND
  OracleCheck(ValueCorrectness)(condition=Compare(v_cpu, v_gpu)) -> FAIL

JIT_Eager_Mismatch ::=
  APICall(api)[mode=eager] -> v1 AND
  APICall(api)[mode=(jit_trace|jit_script)] -> v2 AND
  OracleCheck(ValueCorrectness)(condition=Compare(v1, v2)) -> FAIL

Compile_Eager_Mismatch ::=
  APICall(api)[mode=eager] -> v1 AND
  APICall(api)[mode=compile(fx|dynamo)] -> v2 AND
  OracleCheck(ValueCorrectness)(condition=Compare(v1, v2)) -> FAIL

Functional_Defect ::=
  APICall(api) -> v5 AND
  OracleCheck(ValueCorrectness)(condition=MatchValue(v5, expected),
                                criteria=[dtype, shape, numerical]) -> MISMATCH

Execution_Crash ::=
  APICall(api)[mode=*] -> fault AND
  OracleCheck(ExceptionType)(condition=FaultType(fault) in
                             {FloatingPointException, SegFault, Aborted}) -> TRIGGERED

Precision_Degradation ::=
  APICall(api) -> v AND
  OracleCheck(ValueCorrectness)(condition=Compare(v, expected),
                                tolerance={abs: 1e-4, rel: 1e-5}) -> FAIL

Security_Risk ::=
  (VarDef | APICall | ControlBlock)[security_sensitive=true] AND
  OracleCheck(SecurityViolation)(condition=SecurityPolicyCheck(violation_type=..., severity=(high|medium|low)),
                                 capture_tensors=[...]) -> VIOLATION_DETECTED
)";
}

}  // namespace pfuzz::validator
