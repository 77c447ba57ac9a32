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

#ifndef PFUZZ_VALIDATOR_IR_HPP_
#define PFUZZ_VALIDATOR_IR_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfuzz/common/jsonl.hpp"
#include "pfuzz/harness/harness.hpp"

namespace pfuzz::validator {

enum class IrBugType {
  kDeviceInconsistency,
  kJitEagerMismatch,
  kCompileEagerMismatch,
  kFunctionalDefect,
  kExecutionCrash,
  kPrecisionDegradation,
  kSecurityRisk,
};

inline constexpr IrBugType kAllIrBugTypes[] = {
    IrBugType::kDeviceInconsistency,  IrBugType::kJitEagerMismatch,
    IrBugType::kCompileEagerMismatch, IrBugType::kFunctionalDefect,
    IrBugType::kExecutionCrash,       IrBugType::kPrecisionDegradation,
    IrBugType::kSecurityRisk,
};

// "Device_Inconsistency" etc.
std::string_view to_string(IrBugType t);
// Exact label, case-insensitive; ParseError otherwise.
IrBugType ir_type_from_string(std::string_view label);

// Types whose oracle compares one computation across two environments.
bool is_mismatch_type(IrBugType t);

enum class FactKind { kVarDef, kApiCall, kOracleCheck, kControlBlock, kFault };

std::string_view to_string(FactKind k);
FactKind fact_kind_from_string(std::string_view s);

struct Tolerance {
  double abs = 0;
  double rel = 0;
  friend bool operator==(const Tolerance&, const Tolerance&) = default;
};

// Precision_Degradation's tolerance, exactly as the IR states it.
inline constexpr Tolerance kPrecisionTolerance{1e-4, 1e-5};

/// One execution-relevant fact. Which fields matter depends on `kind`:
///   VarDef(type)[attrs] -> binding
///   APICall(api)[attrs] -> binding
///   OracleCheck(type)(condition(operands), tolerance?, criteria?) -> outcome
///   ControlBlock[attrs]
///   Fault(operands) with fault_kind
struct TraceFact {
  FactKind kind = FactKind::kVarDef;
  std::string type;
  std::string api;
  std::map<std::string, std::string> attrs;
  std::string binding;
  std::string condition;
  std::vector<std::string> operands;
  std::optional<Tolerance> tolerance;
  std::vector<std::string> criteria;
  std::string fault_kind;
  std::string outcome;

  Json to_json() const;
  static TraceFact from_json(const Json& j);
  friend bool operator==(const TraceFact&, const TraceFact&) = default;
};

/// True iff the conjunction of `type`'s clauses is satisfiable against
/// `facts` with consistent bindings.
bool match_ir(const std::vector<TraceFact>& facts, IrBugType type);

// Fault names the crash clause accepts.
inline constexpr std::string_view kCrashFaults[] = {"FloatingPointException", "SegFault",
                                                    "Aborted"};

// SIGSEGV -> SegFault, SIGFPE -> FloatingPointException, SIGABRT -> Aborted;
// other signals map to their own name.
std::string fault_kind_for_signal(std::string_view signal_name);

/// Facts that follow from an execution without reading the program: the call
/// to the target and, for a signal death, the fault it raised.
std::vector<TraceFact> execution_facts(const std::string& target_api,
                                       const harness::ExecutionResult& result);

// The clause text rendered into the classification prompt.
std::string ir_catalog_text();

}  // namespace pfuzz::validator

#endif  // PFUZZ_VALIDATOR_IR_HPP_
