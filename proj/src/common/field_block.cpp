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

#include "pfuzz/common/field_block.hpp"

#include <cctype>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/text.hpp"

namespace pfuzz {

namespace {

std::string fence(std::string_view name) {
  return "=== " + std::string(name) + " ===";
}

// "@name: rest" -> name, rest. Names are [a-z0-9_]+.
std::optional<std::pair<std::string, std::string>> field_line(std::string_view line) {
  if (line.empty() || line[0] != '@') return std::nullopt;
  size_t i = 1;
  while (i < line.size() &&
         (std::islower(static_cast<unsigned char>(line[i])) ||
          std::isdigit(static_cast<unsigned char>(line[i])) || line[i] == '_'))
    ++i;
  if (i == 1 || i >= line.size() || line[i] != ':') return std::nullopt;
  return std::make_pair(std::string(line.substr(1, i - 1)),
                        std::string(line.substr(i + 1)));
}

}  // namespace

FieldBlock FieldBlock::parse(std::string_view text, std::string_view block_name) {
  const std::string open = fence(block_name);
  const std::string close = fence("END");
  auto lines = split_lines(text);
  size_t i = 0;
  while (i < lines.size() && trim(lines[i]) != open) ++i;
  if (i == lines.size())
    throw ParseError("response has no '" + open + "' block");
  ++i;

  FieldBlock block;
  std::string* current = nullptr;
  bool closed = false;
  for (; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line) == close) {
      closed = true;
      break;
    }
    if (auto f = field_line(line)) {
      if (block.has(f->first))
        throw ParseError("field '" + f->first + "' appears twice");
      block.fields_.emplace_back(f->first, f->second);
      current = &block.fields_.back().second;
      continue;
    }
    if (current == nullptr) continue;  // prose before the first field
    *current += '\n';
    *current += line;
  }
  if (!closed) throw ParseError("block '" + open + "' is not terminated");
  for (auto& [name, value] : block.fields_) {
    // Interior indentation survives; surrounding blank space does not.
    size_t b = value.find_first_not_of(" \t\r\n");
    size_t e = value.find_last_not_of(" \t\r\n");
    value = b == std::string::npos ? std::string() : value.substr(b, e - b + 1);
  }
  return block;
}

bool FieldBlock::has(std::string_view field) const {
  for (const auto& [name, value] : fields_)
    if (name == field) return true;
  return false;
}

std::optional<std::string> FieldBlock::get(std::string_view field) const {
  for (const auto& [name, value] : fields_)
    if (name == field) return value;
  return std::nullopt;
}

const std::string& FieldBlock::require(std::string_view field) const {
  for (const auto& [name, value] : fields_) {
    if (name == field) {
      if (value.empty()) break;
      return value;
    }
  }
  throw ParseError("missing field '" + std::string(field) + "'");
}

bool FieldBlock::require_bool(std::string_view field) const {
  const std::string& v = require(field);
  std::string word;
  for (char c : v) {
    if (std::isalpha(static_cast<unsigned char>(c)))
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    else
      break;
  }
  if (word == "yes" || word == "true") return true;
  if (word == "no" || word == "false") return false;
  throw ParseError("field '" + std::string(field) + "' must be yes or no, got '" +
                   v + "'");
}

std::string FieldBlock::render(
    std::string_view block_name,
    const std::vector<std::pair<std::string, std::string>>& fields) {
  std::string out = fence(block_name) + "\n";
  for (const auto& [name, value] : fields) {
    if (value.find('\n') != std::string::npos)
      out += "@" + name + ":\n" + value + "\n";
    else
      out += "@" + name + ": " + value + "\n";
  }
  out += fence("END") + "\n";
  return out;
}

}  // namespace pfuzz
