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

#include "pfuzz/common/jsonl.hpp"

#include <fstream>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/text.hpp"

namespace pfuzz {

namespace {

std::vector<Json> read_impl(
    const std::filesystem::path& path,
    const std::function<void(int, const std::string&)>* on_error) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<Json> docs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      docs.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      std::string msg = path.string() + ":" + std::to_string(line_no) +
                        ": malformed JSON: " + e.what();
      if (on_error == nullptr) throw ParseError(msg);
      (*on_error)(line_no, msg);
    }
  }
  return docs;
}

}  // namespace

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  return read_impl(path, nullptr);
}

std::vector<Json> read_jsonl_lenient(
    const std::filesystem::path& path,
    const std::function<void(int, const std::string&)>& on_error) {
  return read_impl(path, &on_error);
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& docs) {
  std::string out;
  for (const auto& d : docs) {
    out += d.dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

void append_jsonl(const std::filesystem::path& path, const Json& doc) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot append to " + path.string());
  out << doc.dump() << '\n';
}

const Json& require_field(const Json& j, const char* field) {
  if (!j.is_object() || !j.contains(field))
    throw ParseError(std::string("missing field '") + field + "'");
  return j.at(field);
}

std::string require_string(const Json& j, const char* field) {
  const Json& v = require_field(j, field);
  if (!v.is_string())
    throw ParseError(std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

long long require_int(const Json& j, const char* field) {
  const Json& v = require_field(j, field);
  if (!v.is_number_integer())
    throw ParseError(std::string("field '") + field + "' must be an integer");
  return v.get<long long>();
}

}  // namespace pfuzz
