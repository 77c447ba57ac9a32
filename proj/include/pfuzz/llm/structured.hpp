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

#ifndef PFUZZ_LLM_STRUCTURED_HPP_
#define PFUZZ_LLM_STRUCTURED_HPP_

#include <string>
#include <vector>

#include "pfuzz/common/error.hpp"
#include "pfuzz/llm/gateway.hpp"

namespace pfuzz::llm {

inline constexpr int kMaxRepairs = 3;

template <typename T>
struct Parsed {
  T value;
  // Every raw response, the accepted one last.
  std::vector<std::string> responses;
};

/// Sends `request` and parses the answer with `parse`. A ParseError triggers
/// a format-repair re-ask (same component and epoch) quoting the error, up to
/// kMaxRepairs times; the last ParseError is rethrown after that.
template <typename Fn>
auto ask_parsed(Gateway& gateway, const LlmRequest& request, Fn&& parse, int epoch = 0)
    -> Parsed<decltype(parse(std::string()))> {
  Parsed<decltype(parse(std::string()))> out{};
  LlmRequest current = request;
  for (int attempt = 0;; ++attempt) {
    std::string text = gateway.complete(current, epoch).text;
    out.responses.push_back(text);
    try {
      out.value = parse(text);
      return out;
    } catch (const ParseError& e) {
      if (attempt >= kMaxRepairs) throw;
      current = gateway.make_request(TemplateId::kFormatRepair,
                                     {{"original_prompt", request.rendered_prompt},
                                      {"error", e.what()},
                                      {"bad_response", text}},
                                     request.component.empty()
                                         ? std::string(default_component(request.template_id))
                                         : request.component);
      current.temperature = request.temperature;
    }
  }
}

}  // namespace pfuzz::llm

#endif  // PFUZZ_LLM_STRUCTURED_HPP_
