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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtspfuzz/fuzz/engine.hpp"
#include "rtspfuzz/rtsp/seed.hpp"

namespace rtspfuzz::cli {

using json = nlohmann::json;

enum class GatewayMode { Live, Scripted, Replay };

std::string_view tool_version() noexcept;

// Everything a run depends on. Output locations are not part of it, so reports stay
// comparable across run directories.
struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> paths;
  std::uint64_t rng_seed = 1;
  double theta = 0.5;
  std::size_t max_chunks = 64;
  std::size_t refine_every = 5;
  std::size_t section_budget = 4000;
  std::string filter_mode = "rules";     // rules | model
  std::string refine_mode = "extractive"; // extractive | gateway
  std::size_t top_k = 4;
  std::size_t budget = 10000;
  fuzz::CrewToggles crews;
  std::size_t plateau_window = 2000;
  std::size_t plateau_cap = 10;
  std::size_t sample_every = 1000;
  GatewayMode gateway = GatewayMode::Scripted;

  // Throws InvalidArgument.
  void validate() const;
  json to_json() const;
  std::optional<std::filesystem::path> path(const std::string& key) const;
};

std::string_view gateway_mode_name(GatewayMode m) noexcept;
GatewayMode parse_gateway_mode(std::string_view s);

// Exit code for a library error: 2 for usage and configuration problems, 1 otherwise.
int exit_code_for(const Error& e) noexcept;

// Every regular file in the directory, in name order. Throws InvalidArgument for a
// missing directory and EmptySeed when no file parses.
std::vector<rtsp::SeedSequence> load_seed_dir(const std::filesystem::path& dir);

// ---- commands ---------------------------------------------------------------------
// Paths used: ingest {rfc, script?, transcript?, provider?}, index {chunks},
// fuzz {seeds, index?, script?, transcript?, provider?, cve_fixture?, cve_cache?}.

struct IngestSummary {
  std::size_t paragraphs = 0;
  std::size_t kept = 0;
  std::size_t sections = 0;
  std::size_t propositions = 0;
  std::size_t chunks = 0;
  std::vector<std::string> warnings;
};

// Writes chunks.json, propositions.json and ingest.meta.json under out_dir.
IngestSummary cmd_ingest(const RunConfig& cfg, const std::filesystem::path& out_dir);

// Writes the index file plus <file>.meta.json. Throws EmptyIndex for an empty store.
std::size_t cmd_index(const RunConfig& cfg, const std::filesystem::path& out_file);

struct FuzzOutcome {
  fuzz::CampaignStats stats;
  json report;
  std::vector<crews::CrewRunRecord> audit;
};

// Runs one campaign in process; nothing is written.
FuzzOutcome run_fuzz(const RunConfig& cfg);

// Writes report.json, series.csv and, with crews on, crews_audit.ndjson under out_dir.
FuzzOutcome cmd_fuzz(const RunConfig& cfg, const std::filesystem::path& out_dir);

// ---- reports ----------------------------------------------------------------------

struct ReportRow {
  std::string label;
  std::size_t branches = 0;
  std::size_t states = 0;
  std::size_t transitions = 0;
};

ReportRow row_from_report(const json& report, std::string label);

// (reference - value) / value * 100; empty when value is zero.
std::optional<double> percent_delta(double reference, double value);

// The first row is the reference. Every later row shows how far the reference is
// ahead of it, per metric.
std::string comparison_text(const std::vector<ReportRow>& rows);
std::string comparison_csv(const std::vector<ReportRow>& rows);

// Default run directory: runs/<UTC timestamp>-s<seed>.
std::filesystem::path default_run_dir(std::uint64_t rng_seed);

// argv entry point used by the rtspfuzz binary.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rtspfuzz::cli
