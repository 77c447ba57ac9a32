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

#include "pfuzz/cli/app.hpp"

#include <algorithm>
#include <cstdlib>
#include <memory>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "pfuzz/cli/config.hpp"
#include "pfuzz/common/error.hpp"
#include "pfuzz/common/text.hpp"
#include "pfuzz/corpus/fetcher.hpp"
#include "pfuzz/engine/campaign.hpp"
#include "pfuzz/llm/openai_provider.hpp"
#include "pfuzz/matcher/api_matcher.hpp"
#include "pfuzz/matcher/pilot.hpp"
#include "pfuzz/pattern/pattern.hpp"
#include "pfuzz/report/report.hpp"
#include "pfuzz/validator/validator.hpp"

namespace pfuzz::cli {

namespace fs = std::filesystem;

fs::path Workspace::campaign(const corpus::IssueRef& source) const {
  std::string slug = source.repo;
  std::replace(slug.begin(), slug.end(), '/', '-');
  return campaigns() / (slug + "-" + std::to_string(source.number));
}

corpus::IssueRef parse_issue_ref(const std::string& text) {
  auto hash = text.rfind('#');
  if (hash == std::string::npos || hash == 0 || hash + 1 == text.size())
    throw ParseError("expected owner/repo#number, got '" + text + "'");
  try {
    std::size_t used = 0;
    int n = std::stoi(text.substr(hash + 1), &used);
    if (used != text.size() - hash - 1 || n <= 0) throw std::invalid_argument("");
    return {text.substr(0, hash), n};
  } catch (const std::logic_error&) {
    throw ParseError("bad issue number in '" + text + "'");
  }
}

namespace {

struct Globals {
  std::string config;
  std::string replay;
  bool record = false;
  std::string budget;
  std::size_t window = 0;
  std::string out = "work";
};

// Everything one command needs, built from the globals and the config file.
class Session {
 public:
  Session(const Globals& g, std::string command, std::ostream& out, std::ostream& err,
          const Providers* providers)
      : g_(g), command_(std::move(command)), out_(out), err_(err), ws_{g.out},
        providers_(providers) {
    if (!g.config.empty()) cfg_ = load_config(g.config);
    if (!g.budget.empty()) {
      cfg_.campaign.budget = Money::parse(g.budget);
      cfg_.gateway.budget = cfg_.campaign.budget;
    }
    if (g.window) cfg_.campaign.window_size = g.window;
    cfg_.campaign.validate();
  }

  ~Session() {
    // The spend of every command that talked to a model, one line each.
    if (!gateway_ || gateway_->ledger().entries().empty()) return;
    try {
      const auto& ledger = gateway_->ledger();
      Json comps = Json::object();
      for (const auto& [k, v] : ledger.component_totals()) comps[k] = v.to_string();
      append_jsonl(ws_.ledger(), {{"command", command_},
                                  {"mode", mode_name()},
                                  {"calls", ledger.entries().size()},
                                  {"total", ledger.total().to_string()},
                                  {"components", comps}});
      out_ << "cost: " << ledger.total().to_string() << " over " << ledger.entries().size()
           << " calls\n";
    } catch (const std::exception& e) {
      err_ << "warning: could not append to " << ws_.ledger() << ": " << e.what() << '\n';
    }
  }

  const Config& config() const { return cfg_; }
  const Workspace& ws() const { return ws_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

  llm::Gateway& gateway() {
    if (gateway_) return *gateway_;
    llm::GatewayOptions opts = cfg_.gateway;
    fs::path dir = g_.replay.empty() ? ws_.root / "cassettes" : fs::path(g_.replay);
    opts.mode = g_.record ? llm::Mode::kRecord
                          : (g_.replay.empty() ? llm::Mode::kLive : llm::Mode::kReplay);
    auto cassette = std::make_shared<llm::Cassette>();
    if (opts.mode != llm::Mode::kLive) {
      // resume and validate repeat fuzz prompts, so they share its cassette.
      const bool fuzzing = command_ == "resume" || command_ == "validate";
      cassette_path_ = dir / ((fuzzing ? std::string("fuzz") : command_) + ".jsonl");
      if (fs::exists(cassette_path_)) {
        cassette = std::make_shared<llm::Cassette>(llm::Cassette::load(cassette_path_));
      } else if (opts.mode == llm::Mode::kReplay) {
        throw Error("no cassette at " + cassette_path_.string());
      }
      if (opts.mode == llm::Mode::kRecord) {
        fs::create_directories(dir);
        cassette->bind(cassette_path_);
      }
    }
    std::shared_ptr<llm::ChatProvider> chat;
    std::shared_ptr<llm::EmbeddingProvider> embeddings;
    if (providers_) {
      chat = providers_->chat;
      embeddings = providers_->embeddings;
    } else if (opts.mode != llm::Mode::kReplay) {
      const char* key = std::getenv(cfg_.api_key_env.c_str());
      if (!key || !*key)
        throw Error("set $" + cfg_.api_key_env + " or pass --replay <cassette dir>");
      auto openai = std::make_shared<llm::OpenAiProvider>(llm::OpenAiOptions{cfg_.base_url, key});
      chat = openai;
      embeddings = openai;
    }
    mode_ = opts.mode;
    gateway_ = std::make_unique<llm::Gateway>(opts, cassette, chat, embeddings);
    return *gateway_;
  }
  std::string cassette_ref() const { return cassette_path_.string(); }

  harness::Harness& harness() {
    if (harness_) return *harness_;
    if (!cfg_.harness_transcript.empty())
      harness_ = harness::TranscriptHarness::load(cfg_.harness_transcript);
    else
      harness_ = std::make_unique<harness::ProcessHarness>(cfg_.harness_command);
    return *harness_;
  }

 private:
  std::string mode_name() const {
    switch (mode_) {
      case llm::Mode::kLive: return "live";
      case llm::Mode::kRecord: return "record";
      case llm::Mode::kReplay: return "replay";
    }
    return "?";
  }

  Globals g_;
  std::string command_;
  std::ostream& out_;
  std::ostream& err_;
  Workspace ws_;
  Config cfg_;
  std::unique_ptr<llm::Gateway> gateway_;
  llm::Mode mode_ = llm::Mode::kLive;
  fs::path cassette_path_;
  std::unique_ptr<harness::Harness> harness_;
  const Providers* providers_;
};

void require_file(const fs::path& p, std::string_view producer) {
  if (!fs::exists(p))
    throw Error(p.string() + " not found; run `pfuzz " + std::string(producer) + "` first");
}

// ---- ingest -------------------------------------------------------------

struct IngestArgs {
  std::string fixtures;
  std::vector<std::string> repos;
  int start_page = 1;
  int max_pages = 0;
  bool no_extract = false;
};

int cmd_ingest(Session& s, const IngestArgs& a) {
  const auto& ws = s.ws();
  corpus::Corpus corpus = fs::exists(ws.corpus()) ? corpus::Corpus::load(ws.corpus())
                                                  : corpus::Corpus{};
  std::unique_ptr<corpus::Fetcher> fetcher;
  if (!a.fixtures.empty()) {
    fetcher = std::make_unique<corpus::FixtureFetcher>(a.fixtures);
  } else {
    const char* token = std::getenv(s.config().github_token_env.c_str());
    fetcher = std::make_unique<corpus::GithubFetcher>(
        corpus::GithubOptions{s.config().github_url, token ? token : "", 50, 60});
  }
  const auto repos = a.repos.empty() ? s.config().repos : a.repos;
  for (const auto& repo : repos) {
    int cursor = a.start_page;
    for (int pages = 0; a.max_pages == 0 || pages < a.max_pages; ++pages) {
      corpus::Page page;
      try {
        page = fetcher->fetch_page(repo, cursor);
      } catch (const RateLimitedError& e) {
        corpus.relink();
        corpus.save(ws.corpus());
        s.err() << "rate limited on " << repo << ": " << e.what()
                << "\nprogress saved; continue with --repo " << repo << " --start-page "
                << e.cursor() << '\n';
        return kExitError;
      }
      for (auto& i : page.issues) corpus.upsert(std::move(i));
      for (auto& p : page.prs) corpus.upsert(std::move(p));
      if (!page.next_cursor) break;
      cursor = *page.next_cursor;
    }
  }
  corpus.relink();
  corpus.save(ws.corpus());
  auto fixed = corpus::select_fixed_issues(corpus);
  s.out() << corpus.issues().size() << " issues, " << corpus.prs().size() << " pull requests, "
          << fixed.size() << " fixed issues\n";
  if (a.no_extract) return kExitOk;

  std::vector<pattern::BugPattern> patterns;
  std::set<corpus::IssueRef> have;
  if (fs::exists(ws.patterns())) {
    patterns = pattern::load_patterns(ws.patterns());
    for (const auto& p : patterns) have.insert(p.source_issue);
  }
  std::size_t added = 0;
  try {
    for (const auto& [issue, pr] : fixed) {
      if (have.count(issue.ref())) continue;
      try {
        patterns.push_back(pattern::extract_pattern(issue, pr, s.gateway()));
        ++added;
      } catch (const ParseError& e) {
        s.err() << "skipped " << issue.ref().str() << ": " << e.what() << '\n';
      }
    }
  } catch (...) {
    pattern::save_patterns(ws.patterns(), patterns);
    throw;
  }
  pattern::save_patterns(ws.patterns(), patterns);
  s.out() << added << " new patterns, " << patterns.size() << " total\n";
  return kExitOk;
}

// ---- catalog / describe / embed -----------------------------------------

int cmd_catalog(Session& s) {
  auto catalog = matcher::build_catalog(s.harness(), s.config().library);
  matcher::save_catalog(s.ws().catalog(), catalog);
  s.out() << catalog.size() << " APIs in " << s.config().library << '\n';
  return kExitOk;
}

int cmd_describe(Session& s) {
  const auto& ws = s.ws();
  require_file(ws.catalog(), "catalog");
  auto catalog = matcher::load_catalog(ws.catalog());
  std::vector<matcher::FunctionalDescription> done;
  std::set<std::string> have;
  if (fs::exists(ws.descriptions())) {
    done = matcher::load_descriptions(ws.descriptions());
    for (const auto& d : done) have.insert(d.api);
  }
  std::size_t added = 0, skipped = 0;
  try {
    for (const auto& api : catalog) {
      if (have.count(api.qualified_name)) continue;
      try {
        done.push_back(matcher::describe_api(api, s.gateway()));
        ++added;
      } catch (const ParseError& e) {
        ++skipped;
        s.err() << "skipped " << api.qualified_name << ": " << e.what() << '\n';
      }
    }
  } catch (...) {
    matcher::save_descriptions(ws.descriptions(), done);
    throw;
  }
  matcher::save_descriptions(ws.descriptions(), done);
  s.out() << added << " described, " << skipped << " skipped, " << done.size() << " total\n";
  return kExitOk;
}

int cmd_embed(Session& s) {
  require_file(s.ws().descriptions(), "describe");
  auto descriptions = matcher::load_descriptions(s.ws().descriptions());
  auto db = matcher::embed_descriptions(descriptions, s.gateway());
  db.save(s.ws().embeddings());
  s.out() << db.size() << " embeddings (" << db.model_id() << ")\n";
  return kExitOk;
}

// ---- pilot --------------------------------------------------------------

int cmd_pilot(Session& s) {
  const auto& ws = s.ws();
  require_file(ws.patterns(), "ingest");
  auto patterns = pattern::load_patterns(ws.patterns());
  std::map<std::string, std::string> described;
  if (fs::exists(ws.descriptions()))
    for (const auto& d : matcher::load_descriptions(ws.descriptions()))
      described[d.api] = d.description_text;

  // Three texts per issue: what the API does, the trigger, the oracle.
  std::vector<std::string> texts;
  for (const auto& p : patterns) {
    auto it = described.find(p.bug_api);
    texts.push_back(it != described.end() ? it->second : p.bug_api);
    texts.push_back(p.triggering_context);
    texts.push_back(p.oracle_design);
  }
  std::vector<llm::EmbeddingVector> vecs;
  constexpr std::size_t kBatch = 63;  // a multiple of three keeps triplets whole
  for (std::size_t i = 0; i < texts.size(); i += kBatch) {
    std::span<const std::string> chunk(texts.data() + i, std::min(kBatch, texts.size() - i));
    auto part = s.gateway().embed(chunk);
    vecs.insert(vecs.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  std::vector<matcher::PilotTriplet> triplets;
  for (std::size_t i = 0; i < patterns.size(); ++i)
    triplets.push_back({patterns[i].source_issue.str(), vecs[3 * i].values,
                        vecs[3 * i + 1].values, vecs[3 * i + 2].values});
  auto result = matcher::pilot_analysis(triplets);
  matcher::write_pilot_outputs(ws.pilot(), result);
  s.out() << result.pair_count() << " pairs, r = " << result.correlation.r
          << ", p = " << result.correlation.p_value << '\n';
  return kExitOk;
}

// ---- fuzz / resume / validate -------------------------------------------

// What a campaign borrows: loaded once per command.
struct FuzzInputs {
  corpus::Corpus corpus;
  std::unique_ptr<matcher::EmbeddingMatcher> matcher;
  std::unique_ptr<validator::Validator> validator;

  const corpus::IssueRecord& issue(const corpus::IssueRef& ref) const {
    const auto* i = corpus.find_issue(ref);
    if (!i) throw Error("issue " + ref.str() + " is not in the corpus");
    return *i;
  }
};

FuzzInputs load_fuzz_inputs(Session& s) {
  const auto& ws = s.ws();
  require_file(ws.catalog(), "catalog");
  require_file(ws.embeddings(), "embed");
  FuzzInputs in;
  in.corpus = corpus::Corpus::load(ws.corpus());
  in.matcher = std::make_unique<matcher::EmbeddingMatcher>(
      matcher::load_catalog(ws.catalog()), matcher::EmbeddingDb<double>::load(ws.embeddings()));
  in.validator = std::make_unique<validator::Validator>(
      s.gateway(), validator::ValidatorOptions{s.config().campaign.repeats});
  return in;
}

void trace_tests(Session& s, engine::Campaign& c) {
  c.on_test = [&s](const engine::TestRecord& r) {
    s.out() << "  r" << r.round << ' ' << r.target_api << ": " << engine::to_string(r.outcome);
    if (r.outcome == engine::TestOutcome::kGenerationFailed ||
        r.outcome == engine::TestOutcome::kIncomplete)
      s.out() << " (" << r.detail << ')';
    s.out() << '\n';
  };
}

void finish(Session& s, const engine::Campaign& c) {
  const auto& st = c.state();
  s.out() << "  halted: " << (st.halt_reason.empty() ? "round limit" : st.halt_reason) << " after "
          << st.tests_generated << " tests in " << st.round << " rounds, "
          << st.findings.size() << " findings\n";
}

int write_report(Session& s) {
  auto r = report::emit_report(s.ws().campaigns(), s.ws().report());
  for (const auto& p : r.problems) s.err() << "warning: " << p.file.string() << ": " << p.message << '\n';
  s.out() << "report: " << (s.ws().report() / "report.md").string() << " (" << r.findings.size()
          << " findings over " << r.campaigns << " campaigns)\n";
  return r.findings.empty() ? kExitOk : kExitFindings;
}

struct FuzzArgs {
  std::vector<std::string> patterns;
  int max_rounds = 0;
};

int cmd_fuzz(Session& s, const FuzzArgs& a) {
  require_file(s.ws().patterns(), "ingest");
  auto patterns = pattern::load_patterns(s.ws().patterns());
  if (!a.patterns.empty()) {
    std::set<corpus::IssueRef> wanted;
    for (const auto& p : a.patterns) wanted.insert(parse_issue_ref(p));
    std::erase_if(patterns, [&](const auto& p) { return !wanted.count(p.source_issue); });
    if (patterns.size() != wanted.size()) throw Error("some --pattern refs have no pattern");
  }
  auto in = load_fuzz_inputs(s);
  for (const auto& p : patterns) {
    const fs::path dir = s.ws().campaign(p.source_issue);
    if (fs::exists(dir / "snapshot.json")) {
      s.out() << p.source_issue.str() << ": already in " << dir.string()
              << " (use `pfuzz resume`)\n";
      continue;
    }
    s.out() << p.source_issue.str() << " (" << p.bug_api << ", "
            << pattern::to_string(p.bug_category) << ")\n";
    engine::Campaign c({in.issue(p.source_issue), *in.matcher, s.gateway(), s.harness(),
                        *in.validator},
                       p, s.config().campaign, dir, s.cassette_ref());
    trace_tests(s, c);
    c.run(a.max_rounds > 0 ? std::optional<int>(a.max_rounds) : std::nullopt);
    finish(s, c);
    if (c.state().halt_reason == engine::halt::kBudget) {
      s.err() << "budget exhausted; remaining patterns skipped\n";
      break;
    }
  }
  return write_report(s);
}

int cmd_resume(Session& s, const std::string& dir, int max_rounds) {
  auto snap = engine::CampaignSnapshot::load(fs::path(dir) / "snapshot.json");
  auto in = load_fuzz_inputs(s);
  const auto& p = snap.state.pattern;
  auto c = engine::Campaign::resume(
      {in.issue(p.source_issue), *in.matcher, s.gateway(), s.harness(), *in.validator}, p, dir);
  s.out() << p.source_issue.str() << ": resuming at round " << snap.state.round << " with "
          << snap.state.tests_generated << " tests done\n";
  trace_tests(s, c);
  c.run(max_rounds > 0 ? std::optional<int>(max_rounds) : std::nullopt);
  finish(s, c);
  return write_report(s);
}

int cmd_validate(Session& s, const std::string& campaign, const std::string& test) {
  const fs::path dir = fs::path(campaign) / "tests" / test;
  require_file(dir / "test.json", "fuzz");
  require_file(dir / "result.json", "fuzz");
  auto snap = engine::CampaignSnapshot::load(fs::path(campaign) / "snapshot.json");
  auto corpus = corpus::Corpus::load(s.ws().corpus());
  const auto* issue = corpus.find_issue(snap.state.pattern.source_issue);
  if (!issue) throw Error("issue " + snap.state.pattern.source_issue.str() + " is not in the corpus");
  auto t = engine::TransferredTest::from_json(Json::parse(read_file(dir / "test.json")));
  auto r = harness::ExecutionResult::from_json(Json::parse(read_file(dir / "result.json")));
  validator::Validator v(s.gateway(), {s.config().campaign.repeats});
  auto verdict = v.validate({*issue, snap.state.pattern, t, r});
  s.out() << verdict.to_json().dump(2) << '\n';
  return verdict.final ? kExitFindings : kExitOk;
}

}  // namespace

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const Providers* providers) {
  CLI::App app{"Transfers fixed library bugs to similar APIs and checks the results."};
  app.name("pfuzz");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "TOML configuration file")->check(CLI::ExistingFile);
  app.add_option("--replay", g.replay, "cassette directory; answers come only from it");
  app.add_flag("--record", g.record, "call the model for keys the cassettes lack and record them");
  app.add_option("--budget", g.budget, "spending cap, e.g. 5.00");
  app.add_option("--window", g.window, "APIs tested per round from the similarity queue");
  app.add_option("--out", g.out, "workspace directory")->capture_default_str();

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "fetch fixed issues and extract bug patterns");
  c_ingest->add_option("--fixtures", ingest.fixtures, "read issues/ and pulls/ from a directory")
      ->check(CLI::ExistingDirectory);
  c_ingest->add_option("--repo", ingest.repos, "owner/repo to crawl (repeatable)");
  c_ingest->add_option("--start-page", ingest.start_page, "first page to fetch")->check(CLI::PositiveNumber);
  c_ingest->add_option("--max-pages", ingest.max_pages, "pages per repository, 0 for all");
  c_ingest->add_flag("--no-extract", ingest.no_extract, "only update the corpus");

  auto* c_catalog = app.add_subcommand("catalog", "list the public APIs of the target library");
  auto* c_describe = app.add_subcommand("describe", "write a functional description per API");
  auto* c_embed = app.add_subcommand("embed", "embed the API descriptions");
  auto* c_pilot = app.add_subcommand("pilot", "similarity-versus-oracle correlation over patterns");

  FuzzArgs fuzz;
  auto* c_fuzz = app.add_subcommand("fuzz", "run one campaign per bug pattern");
  c_fuzz->add_option("--pattern", fuzz.patterns, "owner/repo#n to fuzz (repeatable)");
  c_fuzz->add_option("--max-rounds", fuzz.max_rounds, "stop each campaign after this many rounds");

  std::string v_campaign, v_test;
  auto* c_validate = app.add_subcommand("validate", "re-run validation for one executed test");
  c_validate->add_option("campaign", v_campaign, "campaign directory")->required();
  c_validate->add_option("test", v_test, "test directory name, e.g. 0003-r1-torch.clip")->required();

  auto* c_report = app.add_subcommand("report", "summarize every campaign in the workspace");

  std::string r_dir;
  int r_rounds = 0;
  auto* c_resume = app.add_subcommand("resume", "continue an interrupted campaign");
  c_resume->add_option("campaign", r_dir, "campaign directory")->required()->check(CLI::ExistingDirectory);
  c_resume->add_option("--max-rounds", r_rounds, "stop after this many more rounds");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    Session s(g, sub->get_name(), out, err, providers);
    if (sub == c_ingest) return cmd_ingest(s, ingest);
    if (sub == c_catalog) return cmd_catalog(s);
    if (sub == c_describe) return cmd_describe(s);
    if (sub == c_embed) return cmd_embed(s);
    if (sub == c_pilot) return cmd_pilot(s);
    if (sub == c_fuzz) return cmd_fuzz(s, fuzz);
    if (sub == c_validate) return cmd_validate(s, v_campaign, v_test);
    if (sub == c_report) return write_report(s);
    if (sub == c_resume) return cmd_resume(s, r_dir, r_rounds);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace pfuzz::cli
