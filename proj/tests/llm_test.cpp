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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "pfuzz/common/error.hpp"
#include "pfuzz/common/text.hpp"
#include "pfuzz/llm/gateway.hpp"
#include "pfuzz/llm/openai_provider.hpp"
#include "test_util.hpp"

using namespace pfuzz;
using namespace pfuzz::llm;

namespace {

GatewayOptions record_options() {
  GatewayOptions o;
  o.mode = Mode::kRecord;
  o.backoff_base = std::chrono::milliseconds(0);
  return o;
}

class FlakyProvider : public ChatProvider {
 public:
  explicit FlakyProvider(int failures) : failures_(failures) {}
  ProviderReply chat(const LlmRequest&) override {
    if (attempts_++ < failures_) throw ProviderError("transient");
    return {"ok", 10, 5};
  }
  int attempts() const { return attempts_; }

 private:
  int failures_;
  int attempts_ = 0;
};

}  // namespace

TEST_CASE("replay returns the recorded text verbatim") {
  testutil::TempDir dir;
  auto cassette = std::make_shared<Cassette>();
  const std::string weird = "line 1\n  indented\ttab \xE2\x9C\x93 trailing   \n";
  auto provider = std::make_shared<ScriptedChatProvider>(
      [&](const LlmRequest&) { return weird; });
  Gateway rec(record_options(), cassette, provider);
  auto req = rec.make_request(TemplateId::kApiDescription, std::string("describe f"));
  CHECK(rec.complete(req).text == weird);
  cassette->save(dir.path() / "c.jsonl");

  GatewayOptions o;
  o.mode = Mode::kReplay;
  auto loaded = std::make_shared<Cassette>(Cassette::load(dir.path() / "c.jsonl"));
  Gateway replay(o, loaded);
  CHECK(replay.complete(req).text == weird);
  CHECK(replay.complete(req).text == weird);  // referentially transparent
}

TEST_CASE("replay without an entry fails with the key") {
  GatewayOptions o;
  Gateway gw(o, std::make_shared<Cassette>());
  auto req = gw.make_request(TemplateId::kRealBug, std::string("p"));
  CHECK_THROWS_AS(gw.complete(req), CassetteMissError);
}

TEST_CASE("cost is linear in tokens") {
  GatewayOptions o = record_options();
  o.prices["m"] = ModelPrice{Money::parse("1.0"), Money::parse("4.0")};
  o.default_model = "m";
  class Fixed : public ChatProvider {
    ProviderReply chat(const LlmRequest&) override { return {"x", 1000, 500}; }
  };
  Gateway gw(o, std::make_shared<Cassette>(), std::make_shared<Fixed>());
  auto resp = gw.complete(gw.make_request(TemplateId::kBugTransfer, std::string("p")));
  CHECK(resp.cost == Money::parse("0.003"));
  CHECK(gw.ledger().total() == Money::parse("0.003"));
  CHECK(gw.ledger().component_totals().at("bug_transfer") == Money::parse("0.003"));
}

TEST_CASE("four-component ledger totals exactly") {
  CostLedger ledger;
  ledger.append({"bug_pattern_extraction", "o3-mini", "", Money::parse("42.16"), 0, 0});
  ledger.append({"api_matching", "gpt-4o-mini", "", Money::parse("0.32"), 0, 0});
  ledger.append({"bug_transfer", "gpt-4o-mini", "", Money::parse("27.60"), 0, 0});
  ledger.append({"self_validation", "gpt-4.1-mini", "", Money::parse("18.99"), 0, 0});
  CHECK(ledger.total() == Money::parse("89.07"));
  CHECK(ledger.total().to_string() == "89.07");
  auto round = CostLedger::from_json(ledger.to_json());
  CHECK(round.total() == ledger.total());
}

TEST_CASE("epoch participates in the key") {
  int n = 0;
  auto provider = std::make_shared<ScriptedChatProvider>(
      [&](const LlmRequest&) { return "answer " + std::to_string(n++); });
  auto cassette = std::make_shared<Cassette>();
  Gateway gw(record_options(), cassette, provider);
  auto req = gw.make_request(TemplateId::kSameBugPattern, std::string("same prompt"));
  CHECK(gw.complete(req, 0).text == "answer 0");
  CHECK(gw.complete(req, 1).text == "answer 1");
  CHECK(gw.complete(req, 0).text == "answer 0");  // served from the cassette
  CHECK(provider->calls() == 2);
  CHECK(cassette->size() == 2);
}

TEST_CASE("validation prompts run at temperature zero") {
  GatewayOptions o;
  Gateway gw(o, std::make_shared<Cassette>());
  CHECK(gw.make_request(TemplateId::kRealBug, std::string("p")).temperature == 0.0);
  CHECK_FALSE(gw.make_request(TemplateId::kBugTransfer, std::string("p")).temperature);
}

TEST_CASE("live calls retry three times with backoff") {
  GatewayOptions o = record_options();
  o.mode = Mode::kLive;
  auto ok_after_two = std::make_shared<FlakyProvider>(2);
  Gateway gw(o, nullptr, ok_after_two);
  CHECK(gw.complete(gw.make_request(TemplateId::kBugTransfer, std::string("p"))).text == "ok");
  CHECK(ok_after_two->attempts() == 3);

  auto never = std::make_shared<FlakyProvider>(100);
  Gateway gw2(o, nullptr, never);
  CHECK_THROWS_AS(gw2.complete(gw2.make_request(TemplateId::kBugTransfer, std::string("p"))),
                  ProviderError);
  CHECK(never->attempts() == 3);
  CHECK(gw2.ledger().entries().empty());
}

TEST_CASE("live mode does not touch the cassette") {
  GatewayOptions o = record_options();
  o.mode = Mode::kLive;
  auto cassette = std::make_shared<Cassette>();
  Gateway gw(o, cassette, std::make_shared<FlakyProvider>(0));
  gw.complete(gw.make_request(TemplateId::kBugTransfer, std::string("p")));
  CHECK(cassette->size() == 0);
}

TEST_CASE("budget cap halts further calls") {
  GatewayOptions o = record_options();
  o.default_model = "m";
  o.prices["m"] = ModelPrice{Money::parse("1000000"), Money::parse("0")};  // 1 per token
  o.budget = Money::parse("25");
  class TenTokens : public ChatProvider {
    ProviderReply chat(const LlmRequest&) override { return {"x", 10, 0}; }
  };
  Gateway gw(o, std::make_shared<Cassette>(), std::make_shared<TenTokens>());
  for (int i = 0; i < 3; ++i)
    gw.complete(gw.make_request(TemplateId::kBugTransfer, "p" + std::to_string(i)));
  CHECK(gw.ledger().total() == Money::parse("30"));
  CHECK_THROWS_AS(gw.complete(gw.make_request(TemplateId::kBugTransfer, std::string("p9"))),
                  BudgetExceededError);
}

TEST_CASE("concurrent calls keep the ledger exact") {
  GatewayOptions o = record_options();
  o.default_model = "m";
  o.prices["m"] = ModelPrice{Money::parse("0.15"), Money::parse("0.6")};
  o.max_in_flight = 3;
  std::atomic<int> active{0};
  std::atomic<int> peak{0};
  auto provider = std::make_shared<ScriptedChatProvider>([&](const LlmRequest& r) {
    int now = ++active;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
    --active;
    return "reply to " + r.rendered_prompt;
  });
  Gateway gw(o, std::make_shared<Cassette>(), provider);
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 20; ++i)
        gw.complete(gw.make_request(TemplateId::kBugTransfer,
                                    "p " + std::to_string(t) + " " + std::to_string(i)));
    });
  }
  for (auto& th : threads) th.join();
  auto entries = gw.ledger().entries();
  CHECK(entries.size() == 160);
  Money sum;
  for (const auto& e : entries) sum += e.cost;
  CHECK(sum == gw.ledger().total());
  CHECK(peak.load() <= 3);
}

TEST_CASE("cassette files") {
  testutil::TempDir dir;
  SUBCASE("empty file loads as an empty map") {
    std::ofstream(dir.path() / "empty.jsonl").close();
    CHECK(Cassette::load(dir.path() / "empty.jsonl").size() == 0);
  }
  SUBCASE("two entries") {
    Cassette c;
    c.insert(CassetteKey::of(TemplateId::kRealBug, "a", 0), {"m", "x", 1, 2});
    c.insert(CassetteKey::of(TemplateId::kRealBug, "a", 1), {"m", "y", 1, 2});
    c.save(dir.path() / "two.jsonl");
    auto loaded = Cassette::load(dir.path() / "two.jsonl");
    CHECK(loaded.size() == 2);
    CHECK(loaded.entries() == c.entries());
  }
  SUBCASE("record then load is the identity") {
    auto cassette = std::make_shared<Cassette>();
    cassette->bind(dir.path() / "rec.jsonl");
    auto provider = std::make_shared<ScriptedChatProvider>(
        [](const LlmRequest& r) { return "re: " + r.rendered_prompt; });
    Gateway gw(record_options(), cassette, provider);
    for (int i = 0; i < 5; ++i)
      gw.complete(gw.make_request(TemplateId::kCriteriaExtraction, "issue " + std::to_string(i)), i % 2);
    CHECK(Cassette::load(dir.path() / "rec.jsonl").entries() == cassette->entries());
  }
  SUBCASE("duplicate keys are rejected") {
    auto key = CassetteKey::of(TemplateId::kRealBug, "a", 0).str();
    std::ofstream out(dir.path() / "dup.jsonl");
    for (int i = 0; i < 2; ++i)
      out << R"({"key":")" << key
          << R"(","model_id":"m","text":"t","prompt_tokens":1,"completion_tokens":1})" << "\n";
    out.close();
    CHECK_THROWS_AS(Cassette::load(dir.path() / "dup.jsonl"), InvariantError);
  }
  SUBCASE("malformed lines are rejected") {
    std::ofstream(dir.path() / "bad.jsonl") << "{not json\n";
    CHECK_THROWS_AS(Cassette::load(dir.path() / "bad.jsonl"), ParseError);
    std::ofstream(dir.path() / "badkey.jsonl")
        << R"({"key":"nope:abc:0","model_id":"m","text":"t","prompt_tokens":1,"completion_tokens":1})"
        << "\n";
    CHECK_THROWS_AS(Cassette::load(dir.path() / "badkey.jsonl"), ParseError);
  }
}

TEST_CASE("embeddings") {
  FixtureEmbeddingProvider fixture({{"alpha", {1, 0, 0}}, {"beta", {0, 1, 0}}, {"gamma", {0, 0, 1}}});
  auto provider = std::make_shared<FixtureEmbeddingProvider>(fixture);
  auto cassette = std::make_shared<Cassette>();
  Gateway rec(record_options(), cassette, nullptr, provider);
  std::vector<std::string> texts = {"alpha", "beta", "gamma"};
  auto vecs = rec.embed(texts);
  REQUIRE(vecs.size() == 3);
  for (const auto& v : vecs) CHECK(v.dim() == 3);

  // Fixture maps texts to basis vectors: all distinct pairs are orthogonal.
  for (size_t i = 0; i < 3; ++i)
    for (size_t j = 0; j < 3; ++j) {
      double dot = 0;
      for (int k = 0; k < 3; ++k) dot += vecs[i].values[k] * vecs[j].values[k];
      CHECK(dot == (i == j ? 1.0 : 0.0));
    }

  GatewayOptions o;
  Gateway replay(o, cassette);
  std::vector<std::string> twice = {"beta", "beta"};
  auto again = replay.embed(twice);
  CHECK(again[0].values == again[1].values);
  CHECK(again[0].values == vecs[1].values);

  std::vector<std::string> none;
  CHECK_THROWS_AS(replay.embed(none), InvariantError);
  std::vector<std::string> blank = {""};
  CHECK_THROWS_AS(replay.embed(blank), InvariantError);

  FixtureEmbeddingProvider ragged({{"a", {1, 0}}, {"b", {1, 0, 0}}});
  Gateway bad(record_options(), std::make_shared<Cassette>(), nullptr,
              std::make_shared<FixtureEmbeddingProvider>(ragged));
  std::vector<std::string> ab = {"a", "b"};
  CHECK_THROWS_AS(bad.embed(ab), InvariantError);
}

TEST_CASE("openai wire format") {
  LlmRequest req;
  req.model_id = "gpt-4o-mini";
  req.rendered_prompt = "hello";
  req.temperature = 0.0;
  auto body = OpenAiProvider::chat_body(req);
  CHECK(body["model"] == "gpt-4o-mini");
  CHECK(body["messages"][0]["content"] == "hello");
  CHECK(body["temperature"] == 0.0);

  auto reply = OpenAiProvider::decode_chat(nlohmann::json::parse(
      R"({"choices":[{"message":{"content":"hi"}}],"usage":{"prompt_tokens":3,"completion_tokens":1}})"));
  CHECK(reply.text == "hi");
  CHECK(reply.prompt_tokens == 3);
  CHECK_THROWS_AS(OpenAiProvider::decode_chat(nlohmann::json::parse("{}")), ProviderError);

  auto emb = OpenAiProvider::decode_embeddings(
      nlohmann::json::parse(
          R"({"data":[{"index":1,"embedding":[0,1]},{"index":0,"embedding":[1,0]}],"usage":{"prompt_tokens":4}})"),
      2);
  CHECK(emb.vectors[0] == std::vector<double>{1, 0});
  CHECK(emb.tokens[0] == 4);
}

TEST_CASE("request invariants") {
  LlmRequest r;
  CHECK_THROWS_AS(r.validate(), InvariantError);
  r.rendered_prompt = "x";
  r.temperature = 2.5;
  CHECK_THROWS_AS(r.validate(), InvariantError);
  CHECK_THROWS_AS(template_from_string("not_a_template"), ParseError);
  for (TemplateId id : kAllTemplates) CHECK(template_from_string(to_string(id)) == id);
}
