/*
 * Copyright 2026 The rtspfuzz Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "rtspfuzz/crews/crews.hpp"
#include "rtspfuzz/error.hpp"
#include "support.hpp"

using namespace rtspfuzz;
using namespace rtspfuzz::crews;
using rtsp::Method;
using testsupport::asset;
using testsupport::slurp;

namespace {

rtsp::SeedSequence shipped_seed(const std::string& name) { return rtsp::parse_seed(slurp(asset("seeds/" + name))).seed; }

struct Fixture {
  std::shared_ptr<llm::Gateway> gw;
  AuditLog audit;
  CrewContext ctx;

  explicit Fixture(std::shared_ptr<llm::Provider> p) : gw(std::make_shared<llm::Gateway>(std::move(p))) {
    ctx.gateway = gw.get();
    ctx.audit = &audit;
  }
};

Fixture scripted() { return Fixture(llm::ScriptedResponder::load(asset("scripted/crews.json"))); }

std::vector<Method> methods_of(const rtsp::SeedSequence& s) {
  std::vector<Method> out;
  for (const auto& r : s.requests) out.push_back(*r.known_method());
  return out;
}

// Tries every ordering of the missing methods at every insertion position.
bool brute_force_feasible(const std::vector<Method>& seed, std::vector<Method> missing) {
  std::sort(missing.begin(), missing.end());
  do {
    std::vector<std::size_t> pos(missing.size(), 0);
    for (;;) {
      if (std::is_sorted(pos.begin(), pos.end())) {
        std::vector<Method> walk;
        std::size_t k = 0;
        for (std::size_t i = 0; i <= seed.size(); ++i) {
          while (k < missing.size() && pos[k] == i) walk.push_back(missing[k++]);
          if (i < seed.size()) walk.push_back(seed[i]);
        }
        if (fsm_valid_walk(walk)) return true;
      }
      std::size_t d = 0;
      while (d < pos.size() && ++pos[d] > seed.size()) pos[d++] = 0;
      if (d == pos.size()) break;
    }
  } while (std::next_permutation(missing.begin(), missing.end()));
  return false;
}

PlateauHistory history_in(rtsp::State s) {
  PlateauHistory h;
  h.state = s;
  h.exchanges.push_back({"PLAY rtsp://127.0.0.1:8554/wavAudioTest RTSP/1.0\r\nCSeq: 4\r\nSession: 000022B8\r\n\r\n",
                         "RTSP/1.0 200 OK"});
  return h;
}

}  // namespace

TEST_CASE("format_grammar numbers blocks in key order") {
  json m = {{"PLAY", {"PLAY <<VALUE>> RTSP/1.0", "CSeq: <<VALUE>>"}}, {"OPTIONS", {"OPTIONS * RTSP/1.0\r\n"}}};
  CHECK(format_grammar(m) == "1. OPTIONS * RTSP/1.0\\r\\n\n\n2. PLAY <<VALUE>> RTSP/1.0\\r\\n\nCSeq: <<VALUE>>\\r\\n\n");
  auto ts = rtsp::parse_template_text(format_grammar(m));
  REQUIRE(ts.size() == 2);
  CHECK(ts[1].method == Method::Play);
}

TEST_CASE("parse_packet digs a request out of chatty text") {
  auto r = parse_packet("Here it is:\n```\nPAUSE rtsp://h/a RTSP/1.0\nCSeq: 5\nSession: 1\n```\nExplanation: pause");
  CHECK(r.method == "PAUSE");
  CHECK(*r.headers.find("CSeq") == "5");
  auto b = parse_packet(
      "SET_PARAMETER rtsp://h/a RTSP/1.0\nCSeq: 2\nContent-Length: 12\n\nposition: 1\nExplanation: x");
  CHECK(b.body == "position: 1\r");
  CHECK_THROWS_AS(parse_packet("no packet here"), Error);
}

TEST_CASE("fsm table text lists every allowed row") {
  auto t = fsm_table_text();
  CHECK(t.find("INIT --SETUP--> READY") != std::string::npos);
  CHECK(t.find("PLAYING --PAUSE--> READY") != std::string::npos);
  CHECK(t.find("INIT --TEARDOWN-->") == std::string::npos);
}

TEST_CASE("grammar crew turns the scripted mapping into templates") {
  auto f = scripted();
  auto g = run_grammar_crew(f.ctx);
  CHECK(g.templates.size() == 10);
  std::set<Method> ms;
  for (const auto& t : g.templates) ms.insert(t.method);
  CHECK(ms.size() == 10);
  auto recs = f.audit.records();
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].crew == "grammar");
  CHECK_FALSE(recs[0].failure);
}

TEST_CASE("grammar crew drops bad blocks and fails when none survive") {
  Fixture partial(std::make_shared<llm::FunctionProvider>("f", [](const llm::ChatRequest&) {
    return std::string(R"({"PLAY": ["PLAY <<VALUE>> RTSP/1.0"], "BOGUS": ["not a request line"]})");
  }));
  auto g = run_grammar_crew(partial.ctx);
  CHECK(g.templates.size() == 1);
  CHECK(g.warnings.size() == 1);

  Fixture empty(std::make_shared<llm::FunctionProvider>("f", [](const llm::ChatRequest&) {
    return std::string(R"({"BOGUS": ["nothing useful"]})");
  }));
  try {
    run_grammar_crew(empty.ctx);
    FAIL("expected GrammarCrewEmpty");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GrammarCrewEmpty);
  }
  CHECK(empty.audit.records().back().failure);
}

TEST_CASE("desired methods are the rarest ones missing from the seed") {
  std::vector<rtsp::SeedSequence> corpus = {shipped_seed("seed1_play.raw"), shipped_seed("seed2_describe.raw"),
                                            shipped_seed("seed3_options.raw")};
  auto d = choose_desired_methods(corpus[0], corpus);
  CHECK(d == std::vector<Method>{Method::Announce, Method::Pause});
  CHECK(choose_desired_methods(corpus[1], corpus) == std::vector<Method>{Method::Announce, Method::Pause});
}

TEST_CASE("walk and insertion checks") {
  CHECK(fsm_valid_walk({Method::Setup, Method::Play, Method::Pause, Method::Teardown}));
  CHECK_FALSE(fsm_valid_walk({Method::Play}));
  CHECK_FALSE(fsm_valid_walk({Method::Teardown}));
  CHECK(insertion_feasible({Method::Setup, Method::Play}, {Method::Pause}));
  CHECK_FALSE(insertion_feasible({Method::Options}, {Method::Pause}));
  CHECK(insertion_feasible({Method::Options}, {Method::Pause, Method::Setup, Method::Play}));
  CHECK_FALSE(insertion_feasible({Method::Play}, {}));
}

TEST_CASE("property: insertion_feasible agrees with brute force") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, rtsp::kAllMethods.size() - 1);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Method> seed(rng() % 5), missing(1 + rng() % 3);
    for (auto& m : seed) m = rtsp::kAllMethods[pick(rng)];
    for (auto& m : missing) m = rtsp::kAllMethods[pick(rng)];
    CHECK(insertion_feasible(seed, missing) == brute_force_feasible(seed, missing));
  }
}

TEST_CASE("check_enrichment") {
  auto seed = shipped_seed("seed1_play.raw");
  auto with_pause = seed;
  auto pause = rtsp::make_request(Method::Pause, "rtsp://127.0.0.1:8554/wavAudioTest",
                                  {{"CSeq", "5"}, {"Session", "000022B8"}});
  with_pause.requests.insert(with_pause.requests.begin() + 4, pause);
  CHECK(check_enrichment(seed, {Method::Pause}, with_pause).ok);
  CHECK_FALSE(check_enrichment(seed, {Method::Pause, Method::Announce}, with_pause).ok);
  auto dropped = with_pause;
  dropped.requests.erase(dropped.requests.begin());
  CHECK_FALSE(check_enrichment(seed, {Method::Pause}, dropped).ok);
  auto early = seed;
  early.requests.insert(early.requests.begin(), pause);
  auto c = check_enrichment(seed, {Method::Pause}, early);
  CHECK_FALSE(c.ok);
  CHECK(c.reason.find("state machine") != std::string::npos);
}

TEST_CASE("enrichment crew inserts the scripted methods") {
  auto f = scripted();
  auto seed = shipped_seed("seed1_play.raw");
  auto r = run_enrichment_crew(f.ctx, seed, {Method::Announce, Method::Pause});
  CHECK(r.inserted == std::vector<Method>{Method::Announce, Method::Pause});
  CHECK(r.seed.requests.size() == seed.requests.size() + 2);
  CHECK(check_enrichment(seed, r.inserted, r.seed).ok);
  CHECK(fsm_valid_walk(methods_of(r.seed)));
}

TEST_CASE("enrichment skips present methods and rejects infeasible ones") {
  auto f = scripted();
  auto seed = shipped_seed("seed1_play.raw");
  auto r = run_enrichment_crew(f.ctx, seed, {Method::Play});
  CHECK(r.skipped == std::vector<Method>{Method::Play});
  CHECK(r.seed == seed);
  CHECK(f.audit.records().empty());

  rtsp::SeedSequence only_options;
  only_options.requests.push_back(rtsp::make_request(Method::Options, "*", {{"CSeq", "1"}}));
  try {
    run_enrichment_crew(f.ctx, only_options, {Method::Pause});
    FAIL("expected EnrichmentInfeasible");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EnrichmentInfeasible);
  }
}

TEST_CASE("enrichment retries with feedback then gives up") {
  int calls = 0;
  std::string last_prompt;
  Fixture f(std::make_shared<llm::FunctionProvider>("f", [&](const llm::ChatRequest& r) {
    ++calls;
    last_prompt = r.user_prompt;
    return std::string("OPTIONS * RTSP/1.0\r\nCSeq: 1\r\n\r\n");
  }));
  auto seed = shipped_seed("seed2_describe.raw");
  try {
    run_enrichment_crew(f.ctx, seed, {Method::Pause});
    FAIL("expected EnrichmentRejected");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EnrichmentRejected);
  }
  CHECK(calls == 3);
  CHECK(last_prompt.find("previous answer was rejected") != std::string::npos);
  REQUIRE(f.audit.records().size() == 1);
  CHECK(f.audit.records()[0].raw_outputs.size() == 3);
}

TEST_CASE("plateau crew runs all stages for every state") {
  testsupport::TempDir dir("crews_plateau");
  auto cves = cve::CveClient(std::make_shared<cve::FixtureFetcher>(asset("cve")), std::nullopt);
  for (auto s : rtsp::kAllStates) {
    CAPTURE(rtsp::state_name(s));
    auto f = scripted();
    auto pkt = run_plateau_crew(f.ctx, history_in(s), &cves);
    CHECK_FALSE(pkt.prompt.text.empty());
    CHECK_FALSE(pkt.explanation.empty());
    CHECK_NOTHROW(rtsp::parse_request(rtsp::serialize(pkt.request)));
    for (const auto& id : pkt.prompt.cve_refs) CHECK(cve::valid_cve_id(id));
  }
  auto f = scripted();
  auto pkt = run_plateau_crew(f.ctx, history_in(rtsp::State::Playing), &cves);
  CHECK(pkt.request.method == "PAUSE");
  CHECK(*pkt.request.headers.find("CSeq") == "5");
  CHECK(pkt.prompt.cve_refs == std::vector<std::string>{"CVE-2019-15232"});
  auto rec = f.audit.records().back();
  CHECK(rec.crew == "plateau");
  CHECK(rec.prompts.size() == 3);
}

TEST_CASE("plateau crew without a cve client skips the middle stage") {
  auto f = scripted();
  auto pkt = run_plateau_crew(f.ctx, history_in(rtsp::State::Playing), nullptr);
  CHECK(pkt.prompt.cve_refs.empty());
  CHECK(f.audit.records().back().prompts.size() == 2);
}

TEST_CASE("plateau crew failures") {
  auto f = scripted();
  CHECK_THROWS_AS(run_plateau_crew(f.ctx, PlateauHistory{}, nullptr), Error);
  Fixture junk(std::make_shared<llm::FunctionProvider>("f", [](const llm::ChatRequest& r) {
    if (r.task == "crew.plateau.analysis") return std::string(R"({"prompt": "send something"})");
    return std::string("I would rather not.");
  }));
  try {
    run_plateau_crew(junk.ctx, history_in(rtsp::State::Ready), nullptr);
    FAIL("expected PlateauGenerationFailed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::PlateauGenerationFailed);
  }
  CHECK(junk.audit.records().back().failure);
}

TEST_CASE("history vocabulary and query") {
  auto h = history_in(rtsp::State::Playing);
  CHECK(history_vocabulary(h) == std::vector<std::string>{"PLAY", "CSeq", "Session"});
  CHECK(plateau_query(h) == "RTSP/1.0 200 OK PLAYING");
}

TEST_CASE("audit log appends ndjson") {
  testsupport::TempDir dir("crews_audit");
  AuditLog log(dir / "a.ndjson");
  CrewRunRecord r;
  r.crew = "grammar";
  r.failure = "x";
  log.append(r);
  log.append(r);
  auto text = slurp(dir / "a.ndjson");
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(json::parse(text.substr(0, text.find('\n')))["failure"] == "x");
}

TEST_CASE("enrichment accepts a fenced answer") {
  auto seed = shipped_seed("seed2_describe.raw");
  auto pause = rtsp::make_request(Method::Pause, "rtsp://127.0.0.1:8554/wavAudioTest",
                                  {{"CSeq", "9"}, {"Session", "000022B8"}});
  auto enriched = seed;
  enriched.requests.insert(enriched.requests.begin() + 3, pause);
  Fixture f(std::make_shared<llm::FunctionProvider>("f", [&](const llm::ChatRequest&) {
    return "```rtsp\n" + rtsp::serialize_seed(enriched) + "```\nDone.";
  }));
  auto r = run_enrichment_crew(f.ctx, seed, {Method::Pause});
  CHECK(r.seed == enriched);
}
