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

#include <algorithm>
#include <set>
#include <sstream>

#include "rtspfuzz/error.hpp"
#include "rtspfuzz/fuzz/engine.hpp"

namespace rtspfuzz::fuzz {

namespace {

constexpr std::size_t kHistoryLength = 8;

std::vector<std::string> merge(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// Non-printable bytes become \xHH so reports stay valid UTF-8.
std::string join_input(const FuzzInput& in) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (const auto& m : in)
    for (unsigned char c : m) {
      if ((c >= 0x20 && c < 0x7F && c != '\\') || c == '\r' || c == '\n') {
        out.push_back(static_cast<char>(c));
      } else {
        out += "\\x";
        out.push_back(hex[c >> 4]);
        out.push_back(hex[c & 15]);
      }
    }
  return out;
}

}  // namespace

CampaignStats run_campaign(const CampaignConfig& cfg, const std::vector<rtsp::SeedSequence>& seeds, Target& target,
                           CrewSuite crews) {
  if (seeds.empty()) throw Error(Errc::CampaignAborted, "corpus has no seeds");
  try {
    target.reset();
  } catch (const std::exception& e) {
    throw Error(Errc::CampaignAborted, std::string("target failed to start: ") + e.what());
  }

  CampaignStats st;
  if (cfg.budget == 0) {
    st.series.push_back({});
    return st;
  }

  Rng rng(cfg.rng_seed);
  Mutator mutator(cfg.mutator);
  CoverageMap cov;
  StateGraph& graph = st.graph;
  PlateauDetector detector(cfg.plateau_window);
  std::vector<SeedEntry> corpus;
  std::set<std::string> crash_sigs;
  const std::size_t sample_every = std::max<std::size_t>(1, cfg.sample_every);

  std::vector<rtsp::GrammarTemplate> templates;
  auto dictionary = harvest_tokens(seeds);
  auto* ctx = crews.ctx;

  if (ctx && cfg.crews.grammar) {
    try {
      auto g = crews::run_grammar_crew(*ctx);
      templates = std::move(g.templates);
      for (auto& w : g.warnings) st.warnings.push_back("grammar: " + w);
      dictionary = merge(std::move(dictionary), template_tokens(templates));
    } catch (const Error& e) {
      st.warnings.push_back(std::string("grammar crew failed: ") + e.what());
    }
  }
  st.grammar_templates = templates.size();

  std::vector<std::pair<FuzzInput, std::string>> initial;
  std::vector<rtsp::SeedSequence> known = seeds;
  for (const auto& seed : seeds) {
    initial.emplace_back(to_input(seed), "initial");
    if (!ctx || !cfg.crews.enrichment) continue;
    auto desired = crews::choose_desired_methods(seed, known);
    try {
      auto r = crews::run_enrichment_crew(*ctx, seed, desired);
      if (r.inserted.empty()) continue;
      initial.emplace_back(to_input(r.seed), "enriched");
      dictionary = merge(std::move(dictionary), harvest_tokens({r.seed}));
      known.push_back(std::move(r.seed));
      ++st.enriched_seeds;
    } catch (const Error& e) {
      ++st.enrichment_failures;
      st.warnings.push_back(std::string("enrichment failed: ") + e.what());
    }
  }
  auto values = merge(default_values(), dictionary);
  MutationContext mctx{&templates, &dictionary, &values};

  auto sample = [&] {
    st.series.push_back({st.executions, cov.count(), graph.node_count(), graph.edge_count()});
  };

  auto run_one = [&](const FuzzInput& in, const char* origin, bool keep) {
    if (st.executions >= cfg.budget) return;
    auto t = execute(in, target);
    ++st.executions;
    auto fresh = cov.add(t.probes);
    auto delta = graph.update(t);
    if (t.crashed() && crash_sigs.insert(t.fault_signature).second)
      st.crashes.push_back({t.fault_signature, st.executions, join_input(in)});
    bool progress = fresh > 0 || delta.new_nodes > 0;
    if (progress) detector.progress(st.executions);
    if ((progress || delta.new_edges > 0 || keep) && !t.crashed()) {
      SeedEntry e;
      e.input = in;
      e.origin = origin;
      e.probes_hit = t.probes.size();
      e.found_new_state = delta.new_nodes > 0;
      for (const auto& s : t.steps) {
        if (s.status) e.nodes.push_back(s.status);
        e.exchanges.push_back({s.request, s.status_line});
      }
      std::sort(e.nodes.begin(), e.nodes.end());
      e.nodes.erase(std::unique(e.nodes.begin(), e.nodes.end()), e.nodes.end());
      e.final_state = t.states.back();
      corpus.push_back(std::move(e));
    }
    if (st.executions % sample_every == 0) sample();
  };

  for (const auto& [in, origin] : initial) run_one(in, origin.c_str(), true);
  if (corpus.empty()) throw Error(Errc::CampaignAborted, "every seed faulted during the dry run");

  while (st.executions < cfg.budget) {
    auto idx = select_seed(corpus, graph, rng);
    FuzzInput in = corpus[idx].input;
    auto stack = 1 + rng.below(std::max<std::size_t>(1, cfg.max_stack));
    for (std::uint64_t s = 0; s < stack; ++s) in = mutator.mutate(in, rng, mctx);
    run_one(in, "mutation", false);

    if (!detector.check(st.executions)) continue;
    ++st.plateau_triggers;
    if (!ctx || !cfg.crews.plateau || st.plateau_invocations >= cfg.plateau_cap || st.executions >= cfg.budget) continue;
    ++st.plateau_invocations;

    std::size_t best = 0;
    for (std::size_t i = 1; i < corpus.size(); ++i)
      if (corpus[i].probes_hit > corpus[best].probes_hit) best = i;
    crews::PlateauHistory history;
    const auto& ex = corpus[best].exchanges;
    auto from = ex.size() > kHistoryLength ? ex.size() - kHistoryLength : 0;
    history.exchanges.assign(ex.begin() + static_cast<std::ptrdiff_t>(from), ex.end());
    history.state = corpus[best].final_state;
    try {
      auto packet = crews::run_plateau_crew(*ctx, history, crews.cves);
      auto bytes = rtsp::serialize(packet.request);
      bool parses = true;
      try {
        rtsp::parse_request(bytes);
      } catch (const Error&) {
        parses = false;
      }
      st.injected.push_back({st.executions + 1, bytes, parses, packet.prompt.cve_refs});
      FuzzInput next = corpus[best].input;
      next.push_back(bytes);
      run_one(next, "plateau", false);
    } catch (const Error& e) {
      ++st.plateau_failures;
      st.warnings.push_back(std::string("plateau crew failed: ") + e.what());
    }
  }
  if (st.series.empty() || st.series.back().executions != st.executions) sample();

  st.branches = cov.count();
  st.states = graph.node_count();
  st.transitions = graph.edge_count();
  st.corpus_size = corpus.size();
  return st;
}

json campaign_config_json(const CampaignConfig& cfg) {
  return {{"budget", cfg.budget},
          {"rng_seed", cfg.rng_seed},
          {"crews", {{"grammar", cfg.crews.grammar}, {"enrichment", cfg.crews.enrichment}, {"plateau", cfg.crews.plateau}}},
          {"plateau_window", cfg.plateau_window},
          {"plateau_cap", cfg.plateau_cap},
          {"sample_every", cfg.sample_every},
          {"max_stack", cfg.max_stack},
          {"mutator_weights", cfg.mutator.weights}};
}

json report_json(const CampaignStats& s, const json& run_config) {
  json series = json::array();
  for (const auto& p : s.series)
    series.push_back({{"executions", p.executions}, {"branches", p.branches}, {"states", p.states}, {"transitions", p.transitions}});
  json crashes = json::array();
  for (const auto& c : s.crashes)
    crashes.push_back({{"signature", c.signature}, {"first_execution", c.first_execution}, {"input", c.input}});
  json nodes = json::array();
  for (const auto& [code, hits] : s.graph.nodes()) nodes.push_back({{"status", code}, {"hits", hits}});
  json edges = json::array();
  for (const auto& [e, hits] : s.graph.edges())
    edges.push_back({{"from", std::get<0>(e)}, {"to", std::get<1>(e)}, {"method", std::get<2>(e)}, {"hits", hits}});
  json packets = json::array();
  for (const auto& p : s.injected)
    packets.push_back({{"execution", p.execution}, {"packet", p.packet}, {"parses", p.parses}, {"cve_refs", p.cve_refs}});
  return {
      {"tool", "rtspfuzz"},
      {"version", RTSPFUZZ_VERSION},
      {"config", run_config},
      {"final",
       {{"executions", s.executions},
        {"branches", s.branches},
        {"states", s.states},
        {"transitions", s.transitions},
        {"corpus", s.corpus_size}}},
      {"series", series},
      {"crashes", crashes},
      {"state_graph", {{"nodes", nodes}, {"edges", edges}}},
      {"crews",
       {{"grammar_templates", s.grammar_templates},
        {"enriched_seeds", s.enriched_seeds},
        {"enrichment_failures", s.enrichment_failures},
        {"plateau",
         {{"triggers", s.plateau_triggers},
          {"invocations", s.plateau_invocations},
          {"failures", s.plateau_failures},
          {"packets", packets}}}}},
      {"warnings", s.warnings},
  };
}

std::string series_csv(const CampaignStats& s) {
  std::ostringstream out;
  out << "executions,branches,states,transitions\n";
  for (const auto& p : s.series) out << p.executions << ',' << p.branches << ',' << p.states << ',' << p.transitions << '\n';
  return out.str();
}

}  // namespace rtspfuzz::fuzz
