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

#include <cmath>
#include <random>
#include <regex>
#include <set>

#include "doctest.h"
#include "pfuzz/common/error.hpp"
#include "pfuzz/common/text.hpp"
#include "pfuzz/matcher/catalog.hpp"
#include "pfuzz/matcher/pilot.hpp"
#include "pfuzz/matcher/similarity.hpp"
#include "test_util.hpp"

using namespace pfuzz;
using namespace pfuzz::matcher;

namespace {

// Independent oracles: plain loops over std::vector.
double direct_cosine(const std::vector<double>& u, const std::vector<double>& v) {
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double direct_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

Eigen::VectorXd vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("cosine basics") {
  Eigen::Vector3d e1(1, 0, 0);
  CHECK(cosine_similarity(e1, e1) == 1.0);
  CHECK(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)) == 0.0);
  CHECK_THROWS_AS(cosine_similarity(Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 1)), InvariantError);
  CHECK_THROWS_AS(cosine_similarity(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(3)),
                  InvariantError);
  // Works for float as well.
  CHECK(cosine_similarity(Eigen::Vector2f(1, 1), Eigen::Vector2f(2, 2)) == doctest::Approx(1.0f));
}

TEST_CASE("cosine agrees with the direct formula on random pairs") {
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<int> dim_dist(2, 64);
  std::normal_distribution<double> val(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = dim_dist(rng);
    std::vector<double> u(d), v(d);
    for (int i = 0; i < d; ++i) {
      u[i] = val(rng);
      v[i] = val(rng);
    }
    const double c = cosine_similarity(vec(u), vec(v));
    worst = std::max(worst, std::abs(c - direct_cosine(u, v)));
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
    // Symmetric and scale-invariant.
    CHECK(std::abs(c - cosine_similarity(vec(v), vec(u))) <= 1e-12);
    CHECK(std::abs(c - cosine_similarity(scale(rng) * vec(u), vec(v))) <= 1e-12);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("similar queue on a five-API catalog") {
  // Angles chosen so cosines to the anchor (1, 0) are hand-computable:
  // a: 1, b: cos 60 = 0.5, c: 0, d: -1, e: 0.5 (ties with b).
  const double s3 = std::sqrt(3.0);
  EmbeddingDb<double> db("m", {{"b", Eigen::Vector2d(0.5, s3 / 2)},
                               {"a", Eigen::Vector2d(2, 0)},
                               {"e", Eigen::Vector2d(0.5, -s3 / 2)},
                               {"d", Eigen::Vector2d(-3, 0)},
                               {"c", Eigen::Vector2d(0, 1)}});
  Eigen::Vector2d anchor(1, 0);
  auto q = similar_queue("a", anchor, db, 10);

  // Brute-force oracle: score every name, sort by (-score, name).
  std::vector<std::pair<double, std::string>> expected;
  for (const auto& name : db.names()) {
    Eigen::VectorXd row = db.vector(name);
    expected.emplace_back(-std::round(direct_cosine({row(0), row(1)}, {1, 0}) * 1e9) / 1e9, name);
  }
  std::sort(expected.begin(), expected.end());
  REQUIRE(q.entries.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(q.entries[i].api == expected[i].second);
  CHECK(q.entries[0].api == "a");
  CHECK(q.entries[0].score == 1.0);
  CHECK(q.entries[1].api == "b");  // tie with e broken by name
  CHECK(q.entries[2].api == "e");
  CHECK(q.entries.back().api == "d");
  for (std::size_t i = 1; i < q.entries.size(); ++i)
    CHECK(q.entries[i - 1].score >= q.entries[i].score);

  CHECK(similar_queue("a", anchor, db, 2).entries.size() == 2);
  CHECK_THROWS_AS(similar_queue("a", anchor, db, 0), InvariantError);
}

TEST_CASE("queue length never exceeds its capacity") {
  std::mt19937 rng(3);
  std::normal_distribution<double> val(0, 1);
  std::vector<std::pair<std::string, Eigen::VectorXd>> rows;
  for (int i = 0; i < 1500; ++i) {
    Eigen::VectorXd v(8);
    for (int k = 0; k < 8; ++k) v(k) = val(rng);
    rows.emplace_back("api" + std::to_string(i), v);
  }
  EmbeddingDb<double> db("m", rows);
  auto q = similar_queue("api0", db.vector("api0"), db, kDefaultQueueDepth);
  CHECK(q.entries.size() == 1000);
  CHECK(q.entries.front().api == "api0");
  CHECK(similar_queue("api0", db.vector("api0"), db, 5000).entries.size() == 1500);
}

TEST_CASE("embedding db persistence and invariants") {
  testutil::TempDir dir;
  EmbeddingDb<double> db("m", {{"x", Eigen::Vector2d(1, 2)}, {"y", Eigen::Vector2d(3, 4)}});
  db.save(dir.path() / "embeddings.jsonl");
  auto loaded = EmbeddingDb<double>::load(dir.path() / "embeddings.jsonl");
  CHECK(loaded.names() == db.names());
  CHECK(loaded.matrix() == db.matrix());
  CHECK(loaded.model_id() == "m");
  using Rows = std::vector<std::pair<std::string, Eigen::VectorXd>>;
  CHECK_THROWS_AS(EmbeddingDb<double>("m", Rows{{"x", Eigen::Vector2d(1, 0)},
                                                {"x", Eigen::Vector2d(0, 1)}}),
                  InvariantError);
  CHECK_THROWS_AS(EmbeddingDb<double>("m", Rows{{"x", Eigen::Vector2d(1, 0)},
                                                {"y", Eigen::Vector3d(0, 1, 0)}}),
                  InvariantError);
}

TEST_CASE("pearson against the direct formula and frozen p-values") {
  // p-values from an independent statistics package (two-sided, exact).
  struct Case {
    std::vector<double> x, y;
    double r, p;
  };
  const std::vector<Case> cases = {
      {{1, 2, 3, 4, 5}, {2, 4, 5, 4, 5}, 0.7745966692414834, 0.1240270626575546},
      {{1, 2, 3, 4, 5}, {5, 4, 3, 2, 1}, -1.0, 0.0},
      {{1, 2, 3}, {1, 3, 2}, 0.5, 0.6666666666666666},
      {{0, 1, 2, 3, 4, 5}, {0, 1, 4, 9, 16, 25}, 0.9598832852883319, 0.0023817452654436517},
      {{2, 4, 6, 8}, {1, 1, 2, 2}, 0.894427190999916, 0.10557280900008403},
      {{1, -1, 2, -2, 3}, {3, 1, 4, 1, 5}, 0.9839740554813757, 0.002429531609761469},
      {{10, 20, 30, 40, 50, 60, 70}, {8, 3, 9, 2, 7, 4, 6}, -0.17556172079419588,
       0.7065289779530383},
      {{0.5, 1.5, 2.5, 3.5}, {1, 0, 1, 0}, -0.447213595499958, 0.5527864045000421},
      {{1, 2, 3, 4, 5, 6, 7, 8}, {1, 4, 2, 8, 5, 7, 3, 6}, 0.5, 0.20703125},
      {{3, 1, 4, 1, 5, 9, 2, 6}, {2, 7, 1, 8, 2, 8, 1, 8}, 0.20965531907301216,
       0.6182637176162882},
  };
  for (const auto& c : cases) {
    auto got = pearson(vec(c.x), vec(c.y));
    CHECK(std::abs(got.r - direct_pearson(c.x, c.y)) <= 1e-9);
    CHECK(std::abs(got.r - c.r) <= 1e-9);
    CHECK(std::abs(got.p_value - c.p) <= 1e-9);
  }
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(20, -1, 1);
  CHECK(pearson(x, x).r == 1.0);
  CHECK_THROWS_AS(pearson(x, Eigen::VectorXd::Constant(20, 0.3)), UndefinedCorrelationError);
  CHECK_THROWS_AS(pearson(Eigen::VectorXd::Constant(20, 0.3), x), UndefinedCorrelationError);
}

TEST_CASE("pilot analysis over 100 triplets") {
  std::mt19937 rng(11);
  std::normal_distribution<double> val(0, 1);
  auto rand_vec = [&](int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = val(rng);
    return v;
  };
  std::vector<PilotTriplet> triplets;
  for (int i = 0; i < 100; ++i) {
    // Oracle vectors lean on the functional ones, so the correlation is positive.
    Eigen::VectorXd f = rand_vec(16);
    triplets.push_back({"issue" + std::to_string(i), f, rand_vec(16), f + 0.8 * rand_vec(16)});
  }
  auto res = pilot_analysis(triplets);
  CHECK(res.pair_count() == 9900);

  // Recompute pair 0 -> 1 directly.
  auto row = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  CHECK(std::abs(res.x(0) - (0.5 * direct_cosine(row(triplets[0].v_func), row(triplets[1].v_func)) +
                             0.5 * direct_cosine(row(triplets[0].v_context),
                                                 row(triplets[1].v_context)))) <= 1e-12);

  std::size_t binned = 0;
  for (const auto& b : res.bins) {
    binned += b.count;
    CHECK(b.bin_low == b.index / 20.0);
    CHECK(std::abs((b.index + 1) / 20.0 - b.bin_low - kPilotBinWidth) < 1e-15);
  }
  CHECK(binned == 9900);  // every pair in exactly one bin
  for (Eigen::Index i = 0; i < res.x.size(); ++i) {
    const int idx = pilot_bin_index(res.x(i));
    CHECK(idx / 20.0 <= res.x(i) + 1e-12);
    CHECK(res.x(i) < (idx + 1) / 20.0);
  }
  // Bins are unique and ascending.
  for (std::size_t i = 1; i < res.bins.size(); ++i) CHECK(res.bins[i - 1].index < res.bins[i].index);
  CHECK(res.correlation.r > 0.3);

  testutil::TempDir dir;
  write_pilot_outputs(dir.path(), res);
  auto lines = split_lines(read_file(dir.path() / "pairs.csv"));
  CHECK(lines.front() == "x,y");
  CHECK(Json::parse(read_file(dir.path() / "summary.json"))["pairs"] == 9900);

  SUBCASE("multiples of the bin width stay in their own bin") {
    CHECK(pilot_bin_index(0.15) == 3);
    CHECK(pilot_bin_index(0.35) == 7);
    CHECK(pilot_bin_index(1.0) == 20);
    CHECK(pilot_bin_index(-0.05) == -1);
  }
  SUBCASE("too few triplets") {
    CHECK_THROWS_AS(pilot_analysis({triplets[0], triplets[1]}), InvariantError);
  }
  SUBCASE("identical oracle vectors give constant y") {
    auto same = triplets;
    for (auto& t : same) t.v_oracle = Eigen::VectorXd::Ones(16);
    CHECK_THROWS_AS(pilot_analysis(same), UndefinedCorrelationError);
  }
}

TEST_CASE("catalog from the stub library transcript") {
  auto h = harness::TranscriptHarness::load(testutil::fixture("stublib/transcript.json"));
  auto catalog = build_catalog(*h, "stub");

  // Oracle: public top-level functions in the stub sources.
  std::size_t defs = 0;
  std::set<std::string> modules;
  const std::regex def_re(R"(^def ([A-Za-z]\w*)\()");
  for (const auto& e : std::filesystem::directory_iterator(testutil::fixture("stublib/stub"))) {
    if (e.path().filename() == "__init__.py") continue;
    for (const auto& line : split_lines(read_file(e.path())))
      if (std::regex_search(line, def_re)) {
        ++defs;
        modules.insert(e.path().stem().string());
      }
  }
  CHECK(defs == 12);
  CHECK(modules.size() == 3);
  CHECK(catalog.size() == defs);  // the repeated payload is dropped

  const auto* argmax = find_api(catalog, "stub.ops.argmax");
  REQUIRE(argmax);
  CHECK(argmax->doc_text.empty());
  CHECK(find_api(catalog, "stub.linalg.norm")->signature() == "(a, ord=..., *, dtype=...)");
  CHECK(find_api(catalog, "stub.nn.softmax")->signature() == "(x, dim=..., *args, **kwargs)");
  CHECK(find_api(catalog, "stub.ops._check") == nullptr);
  CHECK(build_catalog(*h, "stub") == catalog);  // rescan is identical

  testutil::TempDir dir;
  save_catalog(dir.path() / "catalog.jsonl", catalog);
  CHECK(load_catalog(dir.path() / "catalog.jsonl") == catalog);
  write_jsonl(dir.path() / "dup.jsonl", {catalog[0].to_json(), catalog[0].to_json()});
  CHECK_THROWS_AS(load_catalog(dir.path() / "dup.jsonl"), InvariantError);
}

TEST_CASE("descriptions and embeddings under replay") {
  auto h = harness::TranscriptHarness::load(testutil::fixture("stublib/transcript.json"));
  auto catalog = build_catalog(*h, "stub");

  // Description text is a function of the doc; embeddings are a fixed
  // function of the description text.
  auto describe = [](const llm::LlmRequest& r) {
    auto doc_at = r.rendered_prompt.find("Documentation:\n");
    std::string doc = r.rendered_prompt.substr(doc_at + 15, r.rendered_prompt.find('\n', doc_at + 15) - doc_at - 15);
    return "=== DESCRIPTION ===\n@description: Computes: " + doc + "\n=== END ===";
  };
  class HashEmbed : public llm::EmbeddingProvider {
   public:
    llm::EmbeddingReply embed(const std::string&, std::span<const std::string> texts) override {
      llm::EmbeddingReply r;
      for (const auto& t : texts) {
        std::vector<double> v(8, 0.0);
        for (std::size_t i = 0; i < t.size(); ++i) v[i % 8] += static_cast<unsigned char>(t[i]);
        r.vectors.push_back(v);
        r.tokens.push_back(static_cast<std::int64_t>(t.size()));
      }
      return r;
    }
  };
  auto cassette = std::make_shared<llm::Cassette>();
  llm::GatewayOptions rec;
  rec.mode = llm::Mode::kRecord;
  llm::Gateway recorder(rec, cassette, std::make_shared<llm::ScriptedChatProvider>(describe),
                        std::make_shared<HashEmbed>());
  std::vector<FunctionalDescription> descs;
  for (const auto& api : catalog) descs.push_back(describe_api(api, recorder));
  auto db = embed_descriptions(descs, recorder, 5);

  llm::GatewayOptions rep;
  llm::Gateway replay(rep, cassette);
  std::vector<FunctionalDescription> again;
  for (const auto& api : catalog) again.push_back(describe_api(api, replay));
  CHECK(again == descs);
  auto db2 = embed_descriptions(again, replay, 7);
  CHECK(db2.matrix() == db.matrix());
  CHECK(db2.names() == db.names());

  const auto& svd = *std::find_if(descs.begin(), descs.end(),
                                  [](const auto& d) { return d.api == "stub.linalg.svd"; });
  CHECK(svd.description_text == "Computes: Singular value decomposition of a matrix.");
}
