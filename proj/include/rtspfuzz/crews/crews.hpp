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

#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtspfuzz/cve/client.hpp"
#include "rtspfuzz/kb/index.hpp"
#include "rtspfuzz/llm/gateway.hpp"
#include "rtspfuzz/rtsp/fsm.hpp"
#include "rtspfuzz/rtsp/grammar.hpp"
#include "rtspfuzz/rtsp/seed.hpp"

namespace rtspfuzz::crews {

using json = nlohmann::json;

struct CrewRunRecord {
  std::string crew;
  std::string query;
  std::vector<std::string> context_ids;
  std::vector<std::string> prompts;
  std::vector<std::string> raw_outputs;
  std::optional<json> output;
  std::optional<std::string> failure;
  std::chrono::milliseconds wall{0};

  json to_json() const;
};

// Append-only NDJSON sink. A default-constructed log keeps records in memory only.
class AuditLog {
 public:
  AuditLog() = default;
  explicit AuditLog(std::filesystem::path path);

  void append(CrewRunRecord rec);
  std::vector<CrewRunRecord> records() const;

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mu_;
  std::vector<CrewRunRecord> records_;
};

struct CrewConfig {
  std::size_t top_k = kb::kDefaultTopK;
  std::string grammar_query = "RTSP request methods headers syntax";
  std::string enrichment_query = "RTSP state machine session method ordering";
  std::string cve_keyword = "live555";
  int stage_attempts = 3;  // one try plus two regenerations
};

// Shared plumbing every crew needs.
struct CrewContext {
  const kb::VectorIndex* index = nullptr;
  std::shared_ptr<const kb::Embedder> embedder;
  llm::Gateway* gateway = nullptr;
  AuditLog* audit = nullptr;
  CrewConfig cfg;
};

// ---- tools ------------------------------------------------------------------

// {"METHOD": ["request line", "header", ...]} -> numbered text, blocks in key order.
std::string format_grammar(const json& mapping);

// First well-formed request inside free text (fences and prose around it are ignored).
// Throws MalformedRequest when there is none.
rtsp::RtspRequest parse_packet(std::string_view text);

// Textual form of the transition table handed to prompts.
std::string fsm_table_text();

// ---- grammar ------------------------------------------------------------------

struct GrammarResult {
  std::vector<rtsp::GrammarTemplate> templates;
  std::vector<std::string> warnings;
};

// Throws GrammarCrewEmpty when nothing survives validation.
GrammarResult run_grammar_crew(CrewContext& ctx);

// ---- enrichment ---------------------------------------------------------------

// The two in-scope methods least frequent across the corpus that the seed lacks,
// ties broken by enumeration order.
std::vector<rtsp::Method> choose_desired_methods(const rtsp::SeedSequence& seed,
                                                 const std::vector<rtsp::SeedSequence>& corpus);

// Walks from INIT assuming every request succeeds; false as soon as a request has no
// allowed row in the table.
bool fsm_valid_walk(const std::vector<rtsp::Method>& methods);

// True when the missing methods can be inserted (each once, any order) so the walk is valid.
bool insertion_feasible(const std::vector<rtsp::Method>& seed, const std::vector<rtsp::Method>& missing);

struct EnrichmentCheck {
  bool ok = false;
  std::string reason;
};

// Subsequence, exact-insertion and walk checks of a candidate against the original.
EnrichmentCheck check_enrichment(const rtsp::SeedSequence& original, const std::vector<rtsp::Method>& missing,
                                 const rtsp::SeedSequence& candidate);

struct EnrichmentResult {
  rtsp::SeedSequence seed;
  std::vector<rtsp::Method> inserted;
  std::vector<rtsp::Method> skipped;  // desired methods already present
  std::vector<std::string> warnings;
};

// Throws EnrichmentInfeasible or EnrichmentRejected.
EnrichmentResult run_enrichment_crew(CrewContext& ctx, const rtsp::SeedSequence& seed,
                                     const std::vector<rtsp::Method>& desired);

// ---- plateau --------------------------------------------------------------------

struct Exchange {
  std::string request;   // raw request bytes
  std::string response;  // status line, or a fault description
};

struct PlateauHistory {
  std::vector<Exchange> exchanges;
  rtsp::State state = rtsp::State::Init;
};

struct PlateauPrompt {
  std::string text;
  std::vector<std::string> cve_refs;
};

struct GeneratedPacket {
  rtsp::RtspRequest request;
  std::string explanation;
  PlateauPrompt prompt;
};

// Method and header names seen in the history.
std::vector<std::string> history_vocabulary(const PlateauHistory& h);
std::string plateau_query(const PlateauHistory& h);

// Throws PlateauGenerationFailed. `cves` may be null.
GeneratedPacket run_plateau_crew(CrewContext& ctx, const PlateauHistory& history, cve::CveClient* cves);

}  // namespace rtspfuzz::crews
