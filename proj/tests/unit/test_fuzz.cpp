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

#include <cmath>
#include <set>

#include "rtspfuzz/error.hpp"
#include "rtspfuzz/fuzz/engine.hpp"
#include "support.hpp"

using namespace rtspfuzz;
using namespace rtspfuzz::fuzz;
using rtsp::Method;
using testsupport::asset;
using testsupport::fixture;
using testsupport::load_json;
using testsupport::slurp;

namespace {

const std::string kUri = "rtsp://127.0.0.1:8554/wavAudioTest";

std::string msg(Method m, int cseq, std::string extra = {}) {
  return std::string(rtsp::method_name(m)) + " " + kUri + " RTSP/1.0\r\nCSeq: " + std::to_string(cseq) + "\r\n" +
         extra + "\r\n";
}

std::vector<rtsp::SeedSequence> shipped_seeds() {
  std::vector<rtsp::SeedSequence> out;
  for (const char* n : {"seed1_play.raw", "seed2_describe.raw", "seed3_options.raw"})
    out.push_back(rtsp::parse_seed(slurp(asset(std::string("seeds/") + n))).seed);
  return out;
}

std::vector<rtsp::GrammarTemplate> some_templates() {
  return rtsp::parse_template_text(
      "1. PLAY <<VALUE>> RTSP/1.0\\r\\n\nCSeq: <<VALUE>>\\r\\n\nSession: <<VALUE>>\\r\\n\nRange: <<VALUE>>\\r\\n\n\n"
      "2. GET_PARAMETER <<VALUE>> RTSP/1.0\\r\\n\nCSeq: <<VALUE>>\\r\\n\nSession: <<VALUE>>\\r\\n\n");
}

// Independent rebuild of the status-node graph from raw traces.
std::pair<std::set<int>, std::set<StateGraph::Edge>> recompute(const std::vector<Trace>& ts) {
  std::set<int> nodes;
  std::set<StateGraph::Edge> edges;
  for (const auto& t : ts) {
    int prev = StateGraph::kStart;
    for (const auto& s : t.steps) {
      if (s.status == 0) break;
      nodes.insert(s.status);
      auto sp = s.request.find(' ');
      auto m = sp == std::string::npos ? std::nullopt : rtsp::parse_method(s.request.substr(0, sp));
      edges.insert({prev, s.status, m ? std::string(rtsp::method_name(*m)) : "UNKNOWN"});
      prev = s.status;
    }
  }
  return {nodes, edges};
}

}  // namespace

TEST_CASE("rng helpers") {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.below(7) < 7);
    auto u = r.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.weighted({0, 1, 0}) == 1);
  }
  CHECK_THROWS_AS(r.below(0), Error);
  CHECK_THROWS_AS(r.weighted({0, 0}), Error);
}

TEST_CASE("execute records states, statuses and sorted probes") {
  SimTarget target;
  auto t = execute({msg(Method::Setup, 1, "Transport: RTP/AVP;unicast;client_port=8000-8001\r\n"),
                    msg(Method::Play, 2, "Session: 000022B8\r\n")},
                   target);
  REQUIRE(t.steps.size() == 2);
  CHECK(t.steps[0].status == 200);
  CHECK(t.steps[1].state_after == rtsp::State::Playing);
  CHECK(t.states == std::vector<rtsp::State>{rtsp::State::Init, rtsp::State::Ready, rtsp::State::Playing});
  CHECK(std::is_sorted(t.probes.begin(), t.probes.end()));
  CHECK(std::adjacent_find(t.probes.begin(), t.probes.end()) == t.probes.end());
  CHECK_FALSE(t.crashed());
}

TEST_CASE("execute stops at a fault and signatures are stable") {
  SimTarget target;
  FuzzInput in = {msg(Method::Play, 1, "Session: " + std::string(80, 'Z') + "\r\n"), msg(Method::Options, 2)};
  auto a = execute(in, target);
  auto b = execute(in, target);
  CHECK(a.crashed());
  CHECK(a.steps.size() == 1);
  CHECK(a.steps[0].status == 0);
  CHECK(a.fault_signature == b.fault_signature);
  CHECK(a.probes == b.probes);
}

TEST_CASE("coverage map counts first hits only") {
  CoverageMap m;
  CHECK(m.add({1, 2, 3}) == 3);
  CHECK(m.add({3, 4}) == 1);
  CHECK(m.count() == 4);
  CHECK(m.has(4));
  CHECK_FALSE(m.has(5));
}

TEST_CASE("property: incremental state graph equals recomputation") {
  SimTarget target;
  Mutator mut;
  Rng rng(3);
  auto seeds = shipped_seeds();
  auto dict = harvest_tokens(seeds);
  auto tpl = some_templates();
  auto vals = default_values();
  MutationContext ctx{&tpl, &dict, &vals};
  StateGraph g;
  std::vector<Trace> traces;
  std::size_t new_nodes = 0, new_edges = 0;
  for (int i = 0; i < 600; ++i) {
    auto in = to_input(seeds[i % seeds.size()]);
    for (int k = 0; k < 1 + i % 4; ++k) in = mut.mutate(in, rng, ctx);
    traces.push_back(execute(in, target));
    auto d = g.update(traces.back());
    new_nodes += d.new_nodes;
    new_edges += d.new_edges;
  }
  auto [nodes, edges] = recompute(traces);
  CHECK(g.node_count() == nodes.size());
  CHECK(g.edge_count() == edges.size());
  CHECK(new_nodes == nodes.size());
  CHECK(new_edges == edges.size());
  CHECK(nodes.count(StateGraph::kStart) == 0);
  for (const auto& [e, n] : g.edges()) CHECK(edges.count(e) == 1);
}

TEST_CASE("plateau detector reproduces the frozen synthetic series") {
  auto doc = load_json(fixture("plateau.json"));
  auto window = doc["window"].get<std::size_t>();
  auto progress = doc["progress_indices"].get<std::set<std::size_t>>();
  PlateauDetector d(window);
  std::vector<std::size_t> fires;
  for (std::size_t i = 0; i < doc["length"].get<std::size_t>(); ++i) {
    std::size_t e = i + 1;
    if (progress.count(i)) d.progress(e);
    if (d.check(e)) fires.push_back(e);
  }
  CHECK(fires == doc["fires"].get<std::vector<std::size_t>>());
  REQUIRE(fires.size() == 1);
  CHECK(fires[0] > 310);
  CHECK(fires[0] <= 500);
}

TEST_CASE("property: detector fires exactly every window without progress") {
  for (std::size_t w : {1u, 7u, 100u}) {
    PlateauDetector d(w);
    std::size_t n = 0;
    for (std::size_t e = 1; e <= 10 * w; ++e) n += d.check(e);
    CHECK(n == 10);
  }
}

TEST_CASE("mutation is deterministic for a fixed rng seed") {
  auto seeds = shipped_seeds();
  auto dict = harvest_tokens(seeds);
  auto tpl = some_templates();
  MutationContext ctx{&tpl, &dict, &default_values()};
  Mutator mut;
  Rng a(42), b(42);
  auto in = to_input(seeds[0]);
  for (int i = 0; i < 500; ++i) {
    MutationOp oa, ob;
    auto x = mut.mutate(in, a, ctx, &oa);
    auto y = mut.mutate(in, b, ctx, &ob);
    CHECK(oa == ob);
    CHECK(x == y);
    for (const auto& m : x) CHECK(m.size() <= mut.config().max_message_bytes);
    CHECK(x.size() <= mut.config().max_messages);
  }
}

TEST_CASE("operator frequencies follow the weights") {
  auto dict = harvest_tokens(shipped_seeds());
  auto tpl = some_templates();
  MutationContext ctx{&tpl, &dict, &default_values()};
  Mutator mut;
  Rng rng(9);
  std::array<std::size_t, 7> counts{};
  const std::size_t n = 100000;
  for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(mut.pick(rng, ctx))];
  double total = 0;
  for (double w : mut.config().weights) total += w;
  for (std::size_t i = 0; i < 7; ++i) {
    double want = n * mut.config().weights[i] / total;
    CAPTURE(op_name(kAllOps[i]));
    CHECK(std::abs(counts[i] - want) <= 0.05 * want);
  }
  MutationContext bare;
  for (int i = 0; i < 1000; ++i) {
    auto op = mut.pick(rng, bare);
    CHECK(op != MutationOp::TemplateSub);
    CHECK(op != MutationOp::DictSplice);
  }
}

TEST_CASE("template substitution keeps the message parseable") {
  auto tpl = some_templates();
  std::vector<std::string> vals = {"42", "npt=0-", "000022B8"};
  MutationContext ctx{&tpl, nullptr, &vals};
  Mutator mut;
  Rng rng(2);
  FuzzInput in = {msg(Method::Play, 7, "Session: 000022B8\r\n")};
  for (int i = 0; i < 200; ++i) {
    auto out = mut.apply(MutationOp::TemplateSub, in, rng, ctx);
    REQUIRE(out.size() == 1);
    auto p = rtsp::parse_request_lenient(out[0]).request;
    CHECK((p.method == "PLAY" || p.method == "GET_PARAMETER"));
    CHECK(p.headers.find("CSeq"));
    CHECK(p.headers.find("Session"));
  }
}

TEST_CASE("harvested tokens are sorted, unique and include header parts") {
  auto toks = harvest_tokens(shipped_seeds());
  CHECK(std::is_sorted(toks.begin(), toks.end()));
  CHECK(std::adjacent_find(toks.begin(), toks.end()) == toks.end());
  for (const char* t : {"PLAY", "Session", "000022B8", "RTP/AVP", "unicast", "npt=0.000-"})
    CHECK(std::find(toks.begin(), toks.end(), t) != toks.end());
  auto tt = template_tokens(some_templates());
  CHECK(std::find(tt.begin(), tt.end(), "GET_PARAMETER") != tt.end());
}

TEST_CASE("seed selection follows seed weights") {
  StateGraph g;
  Trace t;
  for (int s : {200, 200, 454}) t.steps.push_back({"x", Method::Play, s, "", rtsp::State::Init});
  for (int i = 0; i < 50; ++i) g.update(t);
  std::vector<SeedEntry> corpus(3);
  corpus[0].nodes = {200};
  corpus[1].nodes = {454};
  corpus[1].found_new_state = true;
  corpus[2].nodes = {};
  std::vector<double> w;
  double total = 0;
  for (const auto& e : corpus) total += w.emplace_back(seed_weight(e, g));
  CHECK(w[1] > w[0]);
  Rng rng(4);
  std::array<std::size_t, 3> c{};
  const std::size_t n = 100000;
  for (std::size_t i = 0; i < n; ++i) ++c[select_seed(corpus, g, rng)];
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(c[i] - n * w[i] / total) <= 0.05 * n * w[i] / total);
  CHECK_THROWS_AS(select_seed({}, g, rng), Error);
}

TEST_CASE("campaign edge cases") {
  SimTarget target;
  CampaignConfig cfg;
  try {
    run_campaign(cfg, {}, target);
    FAIL("expected CampaignAborted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CampaignAborted);
  }
  cfg.budget = 0;
  auto s = run_campaign(cfg, shipped_seeds(), target);
  CHECK(s.executions == 0);
  REQUIRE(s.series.size() == 1);
  CHECK(s.series[0].branches == 0);
}

TEST_CASE("baseline campaign is deterministic and its series is monotone") {
  CampaignConfig cfg;
  cfg.budget = 3000;
  cfg.sample_every = 250;
  cfg.rng_seed = 5;
  SimTarget t1, t2;
  auto a = run_campaign(cfg, shipped_seeds(), t1);
  auto b = run_campaign(cfg, shipped_seeds(), t2);
  CHECK(report_json(a, {}).dump() == report_json(b, {}).dump());
  CHECK(series_csv(a) == series_csv(b));
  CHECK(a.executions == 3000);
  CHECK(a.series.back().executions == 3000);
  for (std::size_t i = 1; i < a.series.size(); ++i) {
    CHECK(a.series[i].executions > a.series[i - 1].executions);
    CHECK(a.series[i].branches >= a.series[i - 1].branches);
    CHECK(a.series[i].states >= a.series[i - 1].states);
    CHECK(a.series[i].transitions >= a.series[i - 1].transitions);
  }
  CHECK(a.branches == a.series.back().branches);
  CHECK(a.states == a.graph.node_count());
  std::set<std::string> sigs;
  for (const auto& c : a.crashes) CHECK(sigs.insert(c.signature).second);
  CHECK(a.injected.empty());

  cfg.rng_seed = 6;
  SimTarget t3;
  CHECK(report_json(run_campaign(cfg, shipped_seeds(), t3), {}).dump() != report_json(a, {}).dump());
}

TEST_CASE("report layout") {
  CampaignConfig cfg;
  cfg.budget = 200;
  SimTarget t;
  auto s = run_campaign(cfg, shipped_seeds(), t);
  auto j = report_json(s, {{"k", 1}});
  CHECK(j["config"]["k"] == 1);
  for (const char* k : {"executions", "branches", "states", "transitions", "corpus"}) CHECK(j["final"].contains(k));
  CHECK(j["series"].size() == s.series.size());
  CHECK(j["state_graph"]["nodes"].is_array());
  CHECK(j["crews"]["plateau"]["packets"].is_array());
  auto csv = series_csv(s);
  CHECK(csv.rfind("executions,branches,states,transitions\n", 0) == 0);
}
