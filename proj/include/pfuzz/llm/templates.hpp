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

#ifndef PFUZZ_LLM_TEMPLATES_HPP_
#define PFUZZ_LLM_TEMPLATES_HPP_

#include <filesystem>
#include <map>
#include <string>

#include "pfuzz/llm/types.hpp"

namespace pfuzz::llm {

/// Prompt text per template slot. Ships with built-in defaults; a directory
/// of `<template_id>.txt` files may replace any of them.
class TemplateRegistry {
 public:
  TemplateRegistry();

  // Files named after unknown slots are an error, missing files keep the
  // default.
  void load_overrides(const std::filesystem::path& dir);

  const std::string& text(TemplateId id) const;
  std::string render(TemplateId id, const std::map<std::string, std::string>& slots) const;

 private:
  std::map<TemplateId, std::string> texts_;
};

/// Shared default registry.
const TemplateRegistry& default_templates();

}  // namespace pfuzz::llm

#endif  // PFUZZ_LLM_TEMPLATES_HPP_
