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

#include "pfuzz/matcher/catalog.hpp"

#include <algorithm>
#include <set>

#include "pfuzz/common/error.hpp"
#include "pfuzz/common/field_block.hpp"
#include "pfuzz/common/text.hpp"
#include "pfuzz/llm/structured.hpp"

namespace pfuzz::matcher {

std::string ApiRecord::signature() const {
  std::string out = "(";
  bool star_done = false;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Param& p = params[i];
    if (i > 0) out += ", ";
    if (p.kind == "KEYWORD_ONLY" && !star_done) {
      out += "*, ";
      star_done = true;
    }
    if (p.kind == "VAR_POSITIONAL") {
      out += "*";
      star_done = true;
    } else if (p.kind == "VAR_KEYWORD") {
      out += "**";
    }
    out += p.name;
    if (p.has_default) out += "=...";
  }
  return out + ")";
}

Json ApiRecord::to_json() const {
  Json ps = Json::array();
  for (const auto& p : params)
    ps.push_back({{"name", p.name}, {"kind", p.kind}, {"has_default", p.has_default}});
  return {{"qualified_name", qualified_name},
          {"module_path", module_path},
          {"params", ps},
          {"doc_text", doc_text}};
}

ApiRecord ApiRecord::from_json(const Json& j) {
  ApiRecord r;
  r.qualified_name = require_string(j, "qualified_name");
  if (trim(r.qualified_name).empty()) throw ParseError("API record with an empty name");
  r.module_path = require_string(j, "module_path");
  if (j.contains("params")) {
    for (const auto& p : j["params"])
      r.params.push_back({require_string(p, "name"), p.value("kind", "POSITIONAL_OR_KEYWORD"),
                          p.value("has_default", false)});
  }
  if (j.contains("doc_text") && !j["doc_text"].is_null()) r.doc_text = require_string(j, "doc_text");
  return r;
}

Catalog build_catalog(harness::Harness& harness, const std::string& library_ref) {
  Catalog out;
  std::set<std::string> seen;
  for (const auto& payload : harness.catalog(library_ref)) {
    ApiRecord r = ApiRecord::from_json(payload);
    if (seen.insert(r.qualified_name).second) out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.qualified_name < b.qualified_name; });
  return out;
}

void save_catalog(const std::filesystem::path& path, const Catalog& catalog) {
  std::vector<Json> docs;
  for (const auto& r : catalog) docs.push_back(r.to_json());
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_jsonl(path, docs);
}

Catalog load_catalog(const std::filesystem::path& path) {
  Catalog out;
  std::set<std::string> seen;
  for (const auto& doc : read_jsonl(path)) {
    ApiRecord r = ApiRecord::from_json(doc);
    if (!seen.insert(r.qualified_name).second)
      throw InvariantError("duplicate API " + r.qualified_name + " in " + path.string());
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.qualified_name < b.qualified_name; });
  return out;
}

const ApiRecord* find_api(const Catalog& catalog, const std::string& name) {
  auto it = std::lower_bound(catalog.begin(), catalog.end(), name,
                             [](const ApiRecord& r, const std::string& n) {
                               return r.qualified_name < n;
                             });
  return it != catalog.end() && it->qualified_name == name ? &*it : nullptr;
}

FunctionalDescription describe_api(const ApiRecord& record, llm::Gateway& gateway) {
  auto request = gateway.make_request(
      llm::TemplateId::kApiDescription,
      {{"qualified_name", record.qualified_name},
       {"module_path", record.module_path},
       {"signature", record.signature()},
       {"doc_text", record.doc_text.empty() ? std::string("(none)") : record.doc_text}});
  auto parsed = llm::ask_parsed(gateway, request, [](const std::string& text) {
    return FieldBlock::parse(text, "DESCRIPTION").require("description");
  });
  return {record.qualified_name, parsed.value};
}

void save_descriptions(const std::filesystem::path& path,
                       const std::vector<FunctionalDescription>& descriptions) {
  std::vector<Json> docs;
  for (const auto& d : descriptions)
    docs.push_back({{"api", d.api}, {"description_text", d.description_text}});
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_jsonl(path, docs);
}

std::vector<FunctionalDescription> load_descriptions(const std::filesystem::path& path) {
  std::vector<FunctionalDescription> out;
  for (const auto& doc : read_jsonl(path)) {
    FunctionalDescription d{require_string(doc, "api"), require_string(doc, "description_text")};
    if (trim(d.description_text).empty()) throw ParseError("empty description for " + d.api);
    out.push_back(std::move(d));
  }
  return out;
}

EmbeddingDb<double> embed_descriptions(const std::vector<FunctionalDescription>& descriptions,
                                       llm::Gateway& gateway, std::size_t batch_size) {
  if (batch_size < 1) throw InvariantError("batch size must be at least 1");
  std::vector<std::pair<std::string, Eigen::VectorXd>> rows;
  std::string model;
  for (std::size_t start = 0; start < descriptions.size(); start += batch_size) {
    const std::size_t end = std::min(descriptions.size(), start + batch_size);
    std::vector<std::string> texts;
    for (std::size_t i = start; i < end; ++i) texts.push_back(descriptions[i].description_text);
    auto vectors = gateway.embed(texts);
    for (std::size_t i = start; i < end; ++i) {
      auto& v = vectors[i - start];
      if (!model.empty() && v.model_id != model)
        throw InvariantError("embeddings from two models in one database");
      model = v.model_id;
      rows.emplace_back(descriptions[i].api, std::move(v.values));
    }
  }
  return EmbeddingDb<double>(model, std::move(rows));
}

}  // namespace pfuzz::matcher
