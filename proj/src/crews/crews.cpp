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
#include <map>
#include <set>

#include "rtspfuzz/crews/crews.hpp"
#include "rtspfuzz/error.hpp"
#include "rtspfuzz/prompts.hpp"

namespace rtspfuzz::crews {

using rtsp::Method;
using rtsp::State;

namespace {

using SteadyClock = std::chrono::steady_clock;

struct Run {
  CrewContext& ctx;
  CrewRunRecord rec;
  SteadyClock::time_point start = SteadyClock::now();

  Run(CrewContext& c, std::string crew, std::string query) : ctx(c) {
    rec.crew = std::move(crew);
    rec.query = std::move(query);
  }

  kb::ContextBundle retrieve() {
    if (!ctx.index || !ctx.embedder || ctx.index->size() == 0) return {};
    auto b = kb::retrieve_context(*ctx.index, *ctx.embedder, rec.query, ctx.cfg.top_k);
    rec.context_ids = b.chunk_ids;
    return b;
  }

  llm::ChatResponse structured(llm::ChatRequest req, const json& schema) {
    rec.prompts.push_back(req.user_prompt);
    try {
      auto r = ctx.gateway->complete_structured(std::move(req), schema);
      rec.raw_outputs.push_back(r.text);
      return r;
    } catch (const SchemaViolationError& e) {
      rec.raw_outputs.push_back(e.last_raw());
      throw;
    }
  }

  std::string text(llm::ChatRequest req) {
    rec.prompts.push_back(req.user_prompt);
    auto r = ctx.gateway->complete(req);
    rec.raw_outputs.push_back(r.text);
    return r.text;
  }

  void finish(std::optional<json> output, std::optional<std::string> failure) {
    rec.output = std::move(output);
    rec.failure = std::move(failure);
    rec.wall = std::chrono::duration_cast<std::chrono::milliseconds>(SteadyClock::now() - start);
    if (ctx.audit) ctx.audit->append(rec);
  }
};

std::vector<std::string> split_blocks(std::string_view text) {
  std::vector<std::string> blocks;
  std::string cur;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (!cur.empty()) blocks.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    cur.append(line).push_back('\n');
  }
  if (!cur.empty()) blocks.push_back(std::move(cur));
  return blocks;
}

// drops markdown fence lines so fenced answers split like bare ones
std::string strip_fences(std::string_view text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto end = nl == std::string_view::npos ? text.size() : nl + 1;
    auto line = text.substr(pos, end - pos);
    auto b = line.find_first_not_of(" \t");
    if (b == std::string_view::npos || line.substr(b, 3) != "```") out.append(line);
    pos = end;
  }
  return out;
}

std::string method_list(const std::vector<Method>& ms) {
  std::string out;
  for (auto m : ms) {
    if (!out.empty()) out += ", ";
    out += rtsp::method_name(m);
  }
  return out;
}

json methods_json(const std::vector<Method>& ms) {
  json arr = json::array();
  for (auto m : ms) arr.push_back(std::string(rtsp::method_name(m)));
  return arr;
}

std::vector<Method> known_methods(const rtsp::SeedSequence& s, bool* all_known = nullptr) {
  std::vector<Method> out;
  if (all_known) *all_known = true;
  for (const auto& r : s.requests) {
    if (auto m = r.known_method())
      out.push_back(*m);
    else if (all_known)
      *all_known = false;
  }
  return out;
}

}  // namespace

// ---- grammar --------------------------------------------------------------------

GrammarResult run_grammar_crew(CrewContext& ctx) {
  Run run(ctx, "grammar", ctx.cfg.grammar_query);
  static const json schema = {
      {"type", "object"},
      {"additionalProperties", {{"type", "array"}, {"minItems", 1}, {"items", {{"type", "string"}}}}},
  };
  GrammarResult result;
  try {
    auto bundle = run.retrieve();
    llm::ChatRequest req;
    req.task = "crew.grammar.extract";
    req.system_prompt = std::string(prompt_asset("grammar_extract"));
    req.user_prompt = "Documentation context:\n" + bundle.rendered + "\nList the client request templates.";
    auto mapping = *run.structured(req, schema).parsed;

    auto text = format_grammar(mapping);
    std::size_t n = 0;
    for (const auto& block : split_blocks(text)) {
      ++n;
      try {
        auto parsed = rtsp::parse_template_text(block);
        if (parsed.size() != 1) throw Error(Errc::TemplateFormatError, "expected one template");
        auto again = rtsp::parse_template_text(rtsp::render_template_text(parsed));
        if (again != parsed) throw Error(Errc::TemplateFormatError, "render/parse round trip differs");
        result.templates.push_back(std::move(parsed.front()));
      } catch (const Error& e) {
        result.warnings.push_back("TemplateDropped: block " + std::to_string(n) + ": " + e.what());
      }
    }
    if (result.templates.empty()) throw Error(Errc::GrammarCrewEmpty, "no template survived validation");
  } catch (const Error& e) {
    run.finish(std::nullopt, e.what());
    if (e.code() == Errc::GrammarCrewEmpty) throw;
    throw Error(Errc::GrammarCrewEmpty, e.what());
  }
  json out = json::array();
  for (const auto& t : result.templates) out.push_back(t.lines);
  run.finish(json{{"templates", out}, {"warnings", result.warnings}}, std::nullopt);
  return result;
}

// ---- enrichment -----------------------------------------------------------------

std::vector<Method> choose_desired_methods(const rtsp::SeedSequence& seed, const std::vector<rtsp::SeedSequence>& corpus) {
  std::map<Method, std::size_t> freq;
  for (auto m : rtsp::kAllMethods) freq[m] = 0;
  for (const auto& s : corpus)
    for (auto m : known_methods(s)) ++freq[m];
  auto present = known_methods(seed);
  std::vector<Method> candidates;
  for (auto m : rtsp::kAllMethods)
    if (std::find(present.begin(), present.end(), m) == present.end()) candidates.push_back(m);
  std::stable_sort(candidates.begin(), candidates.end(), [&](Method a, Method b) { return freq[a] < freq[b]; });
  if (candidates.size() > 2) candidates.resize(2);
  return candidates;
}

bool fsm_valid_walk(const std::vector<Method>& methods) {
  State s = State::Init;
  for (auto m : methods) {
    if (!rtsp::fsm_allows(s, m)) return false;
    s = rtsp::fsm_next(s, m, rtsp::StatusClass::Success);
  }
  return true;
}

bool insertion_feasible(const std::vector<Method>& seed, const std::vector<Method>& missing) {
  if (missing.size() > 16) throw Error(Errc::InvalidArgument, "too many methods to insert");
  const unsigned full = (1u << missing.size()) - 1;
  std::set<std::pair<State, unsigned>> frontier = {{State::Init, 0u}};
  auto close = [&](std::set<std::pair<State, unsigned>> set) {
    std::vector<std::pair<State, unsigned>> work(set.begin(), set.end());
    while (!work.empty()) {
      auto [s, mask] = work.back();
      work.pop_back();
      for (std::size_t i = 0; i < missing.size(); ++i) {
        if (mask & (1u << i) || !rtsp::fsm_allows(s, missing[i])) continue;
        std::pair<State, unsigned> next{rtsp::fsm_next(s, missing[i], rtsp::StatusClass::Success), mask | (1u << i)};
        if (set.insert(next).second) work.push_back(next);
      }
    }
    return set;
  };
  for (auto m : seed) {
    frontier = close(std::move(frontier));
    std::set<std::pair<State, unsigned>> next;
    for (auto [s, mask] : frontier)
      if (rtsp::fsm_allows(s, m)) next.insert({rtsp::fsm_next(s, m, rtsp::StatusClass::Success), mask});
    frontier = std::move(next);
    if (frontier.empty()) return false;
  }
  frontier = close(std::move(frontier));
  return std::any_of(frontier.begin(), frontier.end(), [&](const auto& p) { return p.second == full; });
}

EnrichmentCheck check_enrichment(const rtsp::SeedSequence& original, const std::vector<Method>& missing,
                                 const rtsp::SeedSequence& candidate) {
  std::size_t i = 0;
  std::vector<Method> inserted;
  std::vector<Method> walk;
  for (const auto& r : candidate.requests) {
    auto m = r.known_method();
    if (!m) return {false, "request with unknown method '" + r.method + "'"};
    walk.push_back(*m);
    if (i < original.requests.size() && rtsp::serialize(r) == rtsp::serialize(original.requests[i])) {
      ++i;
      continue;
    }
    inserted.push_back(*m);
  }
  if (i != original.requests.size()) return {false, "original requests are not preserved in order"};
  auto a = inserted;
  auto b = missing;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) return {false, "inserted [" + method_list(inserted) + "], expected [" + method_list(missing) + "]"};
  if (!fsm_valid_walk(walk)) return {false, "request order violates the state machine"};
  return {true, {}};
}

EnrichmentResult run_enrichment_crew(CrewContext& ctx, const rtsp::SeedSequence& seed, const std::vector<Method>& desired) {
  EnrichmentResult result;
  auto present = known_methods(seed);
  std::vector<Method> missing;
  for (auto m : desired) {
    bool have = std::find(present.begin(), present.end(), m) != present.end();
    bool dup = std::find(missing.begin(), missing.end(), m) != missing.end();
    if (have) {
      result.skipped.push_back(m);
      result.warnings.push_back("MethodPresent: " + std::string(rtsp::method_name(m)) + " already in seed");
    } else if (!dup) {
      missing.push_back(m);
    }
  }
  result.seed = seed;
  if (missing.empty()) return result;

  Run run(ctx, "enrichment", ctx.cfg.enrichment_query + " " + method_list(missing));
  bool all_known = true;
  known_methods(seed, &all_known);
  if (!all_known || !insertion_feasible(present, missing)) {
    run.finish(std::nullopt, "EnrichmentInfeasible");
    throw Error(Errc::EnrichmentInfeasible, "no state-machine-valid position for " + method_list(missing));
  }

  std::string numbered;
  for (std::size_t i = 0; i < seed.requests.size(); ++i)
    numbered += "[" + std::to_string(i + 1) + "]\n" + rtsp::serialize(seed.requests[i]) + "\n";

  std::string feedback;
  try {
    auto bundle = run.retrieve();
    for (int attempt = 0; attempt < ctx.cfg.stage_attempts; ++attempt) {
      llm::ChatRequest req;
      req.task = "crew.enrichment";
      req.system_prompt = std::string(prompt_asset("enrichment"));
      req.user_prompt = "State machine:\n" + fsm_table_text() + "\nDocumentation context:\n" + bundle.rendered +
                        "\nClient requests:\n" + numbered + "Methods to insert: " + method_list(missing) + "\n";
      if (!feedback.empty()) req.user_prompt += "Your previous answer was rejected: " + feedback + "\n";
      auto raw = run.text(req);
      try {
        auto parsed = rtsp::parse_seed(strip_fences(raw));
        auto check = check_enrichment(seed, missing, parsed.seed);
        if (!check.ok) {
          feedback = check.reason;
          continue;
        }
        for (const auto& w : parsed.warnings) result.warnings.push_back("SeedsTool: " + w);
        result.seed = std::move(parsed.seed);
        result.inserted = missing;
        run.finish(json{{"inserted", methods_json(missing)}, {"seed", rtsp::serialize_seed(result.seed)}}, std::nullopt);
        return result;
      } catch (const Error& e) {
        if (e.code() != Errc::EmptySeed) throw;
        feedback = "no parseable client request";
      }
    }
  } catch (const Error& e) {
    run.finish(std::nullopt, e.what());
    throw Error(Errc::EnrichmentRejected, e.what());
  }
  run.finish(std::nullopt, "EnrichmentRejected: " + feedback);
  throw Error(Errc::EnrichmentRejected, feedback);
}

// ---- plateau --------------------------------------------------------------------

std::vector<std::string> history_vocabulary(const PlateauHistory& h) {
  std::vector<std::string> out;
  auto add = [&](std::string w) {
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(std::move(w));
  };
  for (const auto& ex : h.exchanges) {
    try {
      auto p = rtsp::parse_request_lenient(ex.request);
      add(p.request.method);
      for (const auto& [name, value] : p.request.headers.items()) add(name);
    } catch (const Error&) {
    }
  }
  return out;
}

std::string plateau_query(const PlateauHistory& h) {
  std::string last = h.exchanges.empty() ? "" : h.exchanges.back().response;
  return last + " " + std::string(rtsp::state_name(h.state));
}

GeneratedPacket run_plateau_crew(CrewContext& ctx, const PlateauHistory& history, cve::CveClient* cves) {
  if (history.exchanges.empty()) throw Error(Errc::InvalidArgument, "plateau crew needs a non-empty history");
  Run run(ctx, "plateau", plateau_query(history));
  GeneratedPacket packet;
  std::string stage = "analysis";
  try {
    auto bundle = run.retrieve();
    std::string exchanges;
    for (const auto& ex : history.exchanges) exchanges += ">>> " + ex.request + "<<< " + ex.response + "\n\n";

    // A: analysis
    static const json analysis_schema = {
        {"type", "object"}, {"required", {"prompt"}}, {"properties", {{"prompt", {{"type", "string"}}}}}};
    llm::ChatRequest a;
    a.task = "crew.plateau.analysis";
    a.system_prompt = std::string(prompt_asset("plateau_analysis"));
    a.user_prompt = "Current state: " + std::string(rtsp::state_name(history.state)) + "\nRecent exchanges:\n" +
                    exchanges + "Documentation context:\n" + bundle.rendered;
    packet.prompt.text = run.structured(a, analysis_schema).parsed->at("prompt").get<std::string>();
    if (packet.prompt.text.empty()) throw Error(Errc::PlateauGenerationFailed, "analysis produced an empty prompt");

    // B: vulnerabilities
    stage = "vulnerabilities";
    std::vector<cve::CveRecord> relevant;
    if (cves) {
      try {
        relevant = cve::relevance_filter(cves->fetch_cves(ctx.cfg.cve_keyword), history_vocabulary(history));
      } catch (const Error&) {
        relevant.clear();
      }
    }
    if (!relevant.empty()) {
      static const json cve_schema = {
          {"type", "object"},
          {"required", {"prompt", "cve_refs"}},
          {"properties", {{"prompt", {{"type", "string"}}}, {"cve_refs", {{"type", "array"}, {"items", {{"type", "string"}}}}}}}};
      llm::ChatRequest b;
      b.task = "crew.plateau.cve";
      b.system_prompt = std::string(prompt_asset("plateau_cve"));
      b.user_prompt = "Instruction: " + packet.prompt.text + "\nVulnerability records:\n";
      for (const auto& c : relevant) b.user_prompt += "- " + c.id + ": " + c.description + "\n";
      try {
        auto refined = *run.structured(b, cve_schema).parsed;
        auto text = refined["prompt"].get<std::string>();
        if (!text.empty()) packet.prompt.text = std::move(text);
        for (const auto& id : refined["cve_refs"]) {
          auto s = id.get<std::string>();
          bool known = std::any_of(relevant.begin(), relevant.end(), [&](const auto& c) { return c.id == s; });
          if (known) packet.prompt.cve_refs.push_back(s);
        }
      } catch (const SchemaViolationError&) {
        packet.prompt.cve_refs.clear();
      }
    }

    // C: packet
    stage = "packet";
    std::string feedback;
    for (int attempt = 0; attempt < ctx.cfg.stage_attempts; ++attempt) {
      llm::ChatRequest c;
      c.task = "crew.plateau.packet";
      c.system_prompt = std::string(prompt_asset("plateau_packet"));
      c.user_prompt = packet.prompt.text;
      if (!feedback.empty()) c.user_prompt += "\nYour previous answer was rejected: " + feedback;
      auto raw = run.text(c);
      try {
        packet.request = parse_packet(raw);
      } catch (const Error& e) {
        feedback = e.what();
        continue;
      }
      if (auto ex = raw.find("Explanation:"); ex != std::string::npos) {
        auto line = raw.substr(ex + 12, raw.find('\n', ex) == std::string::npos ? std::string::npos : raw.find('\n', ex) - ex - 12);
        auto b = line.find_first_not_of(' ');
        packet.explanation = b == std::string::npos ? "" : line.substr(b);
      }
      run.finish(json{{"packet", rtsp::serialize(packet.request)},
                      {"explanation", packet.explanation},
                      {"prompt", packet.prompt.text},
                      {"cve_refs", packet.prompt.cve_refs}},
                 std::nullopt);
      return packet;
    }
    throw Error(Errc::PlateauGenerationFailed, "no parseable packet: " + feedback);
  } catch (const Error& e) {
    run.finish(std::nullopt, stage + ": " + e.what());
    if (e.code() == Errc::PlateauGenerationFailed) throw;
    throw Error(Errc::PlateauGenerationFailed, stage + ": " + e.what());
  }
}

}  // namespace rtspfuzz::crews
