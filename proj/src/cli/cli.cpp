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

#include "rtspfuzz/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "rtspfuzz/cve/client.hpp"
#include "rtspfuzz/kb/index.hpp"
#include "rtspfuzz/rfc/pipeline.hpp"

namespace fs = std::filesystem;

namespace rtspfuzz::cli {

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + p.string());
  out << text;
}

json meta_json(const RunConfig& cfg) { return {{"tool", "rtspfuzz"}, {"version", tool_version()}, {"config", cfg.to_json()}}; }

std::shared_ptr<llm::Provider> make_provider(const RunConfig& cfg) {
  std::shared_ptr<llm::Provider> p;
  switch (cfg.gateway) {
    case GatewayMode::Scripted: {
      auto script = cfg.path("script");
      if (!script) throw Error(Errc::InvalidArgument, "--gateway scripted needs --script");
      if (!fs::exists(*script)) throw Error(Errc::IoError, "script not found: " + script->string());
      p = llm::ScriptedResponder::load(*script);
      break;
    }
    case GatewayMode::Replay: {
      auto t = cfg.path("transcript");
      if (!t) throw Error(Errc::InvalidArgument, "--gateway replay needs --transcript");
      if (!fs::exists(*t)) throw Error(Errc::IoError, "transcript not found: " + t->string());
      return std::make_shared<llm::ReplayProvider>(*t);
    }
    case GatewayMode::Live: {
      auto pc = cfg.path("provider");
      if (!pc) throw Error(Errc::InvalidArgument, "--gateway live needs --provider");
      p = std::make_shared<llm::HttpChatProvider>(llm::HttpProviderConfig::load(*pc));
      break;
    }
  }
  if (auto t = cfg.path("transcript")) p = std::make_shared<llm::RecordingProvider>(p, *t);
  return p;
}

rfc::IngestConfig ingest_config(const RunConfig& cfg) {
  rfc::IngestConfig ic;
  ic.chunker.theta = cfg.theta;
  ic.chunker.max_chunks = cfg.max_chunks;
  ic.chunker.refine_every = cfg.refine_every;
  ic.section_budget = cfg.section_budget;
  ic.filter_mode = cfg.filter_mode == "model" ? rfc::FilterMode::Model : rfc::FilterMode::Rules;
  ic.refine_mode = cfg.refine_mode == "gateway" ? rfc::RefineMode::Gateway : rfc::RefineMode::Extractive;
  return ic;
}

std::string fmt_delta(std::optional<double> d) {
  if (!d) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f%%", *d);
  return buf;
}

}  // namespace

std::string_view tool_version() noexcept { return RTSPFUZZ_VERSION; }

std::string_view gateway_mode_name(GatewayMode m) noexcept {
  switch (m) {
    case GatewayMode::Live: return "live";
    case GatewayMode::Scripted: return "scripted";
    case GatewayMode::Replay: return "replay";
  }
  return "?";
}

GatewayMode parse_gateway_mode(std::string_view s) {
  if (s == "live") return GatewayMode::Live;
  if (s == "scripted") return GatewayMode::Scripted;
  if (s == "replay") return GatewayMode::Replay;
  throw Error(Errc::InvalidArgument, "unknown gateway mode '" + std::string(s) + "'");
}

void RunConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(Errc::InvalidArgument, m); };
  if (!(theta >= 0.0 && theta <= 1.0)) bad("theta must lie in [0, 1]");
  if (max_chunks == 0) bad("max-chunks must be positive");
  if (refine_every == 0) bad("refine-every must be positive");
  if (section_budget == 0) bad("section-budget must be positive");
  if (filter_mode != "rules" && filter_mode != "model") bad("filter-mode must be rules or model");
  if (refine_mode != "extractive" && refine_mode != "gateway") bad("refine-mode must be extractive or gateway");
  if (top_k == 0) bad("top-k must be positive");
  if (plateau_window == 0) bad("plateau-window must be positive");
  if (sample_every == 0) bad("sample-every must be positive");
}

json RunConfig::to_json() const {
  return {
      {"subcommand", subcommand},
      {"paths", paths},
      {"rng_seed", rng_seed},
      {"theta", theta},
      {"max_chunks", max_chunks},
      {"refine_every", refine_every},
      {"section_budget", section_budget},
      {"filter_mode", filter_mode},
      {"refine_mode", refine_mode},
      {"top_k", top_k},
      {"budget", budget},
      {"crews", {{"grammar", crews.grammar}, {"enrichment", crews.enrichment}, {"plateau", crews.plateau}}},
      {"plateau_window", plateau_window},
      {"plateau_cap", plateau_cap},
      {"sample_every", sample_every},
      {"gateway", gateway_mode_name(gateway)},
  };
}

std::optional<fs::path> RunConfig::path(const std::string& key) const {
  auto it = paths.find(key);
  if (it == paths.end() || it->second.empty()) return std::nullopt;
  return fs::path(it->second);
}

int exit_code_for(const Error& e) noexcept {
  switch (e.code()) {
    case Errc::InvalidArgument:
    case Errc::IoError:
    case Errc::EmptyDocument:
    case Errc::EmptyIndex:
    case Errc::EmptySeed:
    case Errc::IndexCorrupt:
    case Errc::EmbedderMismatch:
      return 2;
    default:
      return 1;
  }
}

std::vector<rtsp::SeedSequence> load_seed_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(Errc::InvalidArgument, "seed directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<rtsp::SeedSequence> seeds;
  for (const auto& f : files) {
    try {
      seeds.push_back(rtsp::parse_seed(read_file(f)).seed);
    } catch (const Error& e) {
      if (e.code() != Errc::EmptySeed) throw;
    }
  }
  if (seeds.empty()) throw Error(Errc::EmptySeed, "no parseable seed in " + dir.string());
  return seeds;
}

// ---- ingest / index -----------------------------------------------------------------

IngestSummary cmd_ingest(const RunConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  auto rfc_path = cfg.path("rfc");
  if (!rfc_path) throw Error(Errc::InvalidArgument, "ingest needs --rfc");
  if (!fs::is_regular_file(*rfc_path)) throw Error(Errc::IoError, "rfc file not found: " + rfc_path->string());
  auto text = read_file(*rfc_path);
  llm::Gateway gw(make_provider(cfg));
  auto embedder = std::make_shared<kb::HashEmbedder>();
  auto r = rfc::run_ingest(text, gw, embedder, ingest_config(cfg));

  fs::create_directories(out_dir);
  rfc::write_chunk_store(r.chunks, out_dir / "chunks.json");
  json props = json::array();
  for (const auto& p : r.propositions) props.push_back({{"id", p.id}, {"text", p.text}, {"section", p.source_section}});
  auto pj = meta_json(cfg);
  pj["propositions"] = props;
  write_file(out_dir / "propositions.json", pj.dump(2) + "\n");

  IngestSummary s{r.paragraphs.size(), r.kept.size(), r.sections.size(), r.propositions.size(), r.chunks.size(),
                  r.warnings};
  auto meta = meta_json(cfg);
  meta["counts"] = {{"paragraphs", s.paragraphs},
                    {"kept", s.kept},
                    {"sections", s.sections},
                    {"propositions", s.propositions},
                    {"chunks", s.chunks}};
  meta["warnings"] = s.warnings;
  write_file(out_dir / "ingest.meta.json", meta.dump(2) + "\n");
  return s;
}

std::size_t cmd_index(const RunConfig& cfg, const fs::path& out_file) {
  cfg.validate();
  auto store = cfg.path("chunks");
  if (!store) throw Error(Errc::InvalidArgument, "index needs --chunks");
  if (!fs::is_regular_file(*store)) throw Error(Errc::IoError, "chunk store not found: " + store->string());
  std::vector<rfc::Chunk> chunks;
  try {
    chunks = rfc::read_chunk_store(*store);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, "bad chunk store: " + std::string(e.what()));
  }
  if (chunks.empty()) throw Error(Errc::EmptyIndex, "chunk store " + store->string() + " holds no chunks");
  kb::HashEmbedder embedder;
  auto index = kb::build_index(chunks, embedder);
  if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
  kb::persist(index, out_file);
  auto meta = meta_json(cfg);
  meta["embedder_id"] = embedder.id();
  meta["entries"] = index.size();
  write_file(out_file.string() + ".meta.json", meta.dump(2) + "\n");
  return index.size();
}

// ---- fuzz ---------------------------------------------------------------------------

FuzzOutcome run_fuzz(const RunConfig& cfg) {
  cfg.validate();
  auto seeds_dir = cfg.path("seeds");
  if (!seeds_dir) throw Error(Errc::InvalidArgument, "fuzz needs --seeds");
  auto seeds = load_seed_dir(*seeds_dir);

  fuzz::CampaignConfig cc;
  cc.budget = cfg.budget;
  cc.rng_seed = cfg.rng_seed;
  cc.crews = cfg.crews;
  cc.plateau_window = cfg.plateau_window;
  cc.plateau_cap = cfg.plateau_cap;
  cc.sample_every = cfg.sample_every;

  std::shared_ptr<kb::HashEmbedder> embedder;
  kb::VectorIndex index;
  std::unique_ptr<llm::Gateway> gateway;
  crews::AuditLog audit;
  crews::CrewContext ctx;
  std::unique_ptr<cve::CveClient> cves;
  fuzz::CrewSuite suite;

  if (cfg.crews.any()) {
    embedder = std::make_shared<kb::HashEmbedder>();
    if (auto ip = cfg.path("index")) {
      if (!fs::is_regular_file(*ip)) throw Error(Errc::IoError, "index not found: " + ip->string());
      index = kb::load(*ip, *embedder);
    } else {
      throw Error(Errc::InvalidArgument, "crews need --index");
    }
    gateway = std::make_unique<llm::Gateway>(make_provider(cfg));
    ctx.index = &index;
    ctx.embedder = embedder;
    ctx.gateway = gateway.get();
    ctx.audit = &audit;
    ctx.cfg.top_k = cfg.top_k;
    std::shared_ptr<cve::Fetcher> fetcher;
    if (auto fx = cfg.path("cve_fixture"))
      fetcher = std::make_shared<cve::FixtureFetcher>(*fx);
    else if (cfg.paths.count("cve_live"))
      fetcher = std::make_shared<cve::NvdFetcher>();
    if (fetcher) cves = std::make_unique<cve::CveClient>(fetcher, cfg.path("cve_cache"));
    suite = {&ctx, cves.get()};
  }

  fuzz::SimTarget target;
  FuzzOutcome o;
  o.stats = fuzz::run_campaign(cc, seeds, target, suite);
  auto run_config = cfg.to_json();
  run_config["campaign"] = fuzz::campaign_config_json(cc);
  o.report = fuzz::report_json(o.stats, run_config);
  o.audit = audit.records();
  return o;
}

FuzzOutcome cmd_fuzz(const RunConfig& cfg, const fs::path& out_dir) {
  auto o = run_fuzz(cfg);
  fs::create_directories(out_dir);
  write_file(out_dir / "report.json", o.report.dump(2, ' ', false, json::error_handler_t::replace) + "\n");
  write_file(out_dir / "series.csv", "# " + meta_json(cfg).dump() + "\n" + fuzz::series_csv(o.stats));
  if (cfg.crews.any()) {
    std::string nd = meta_json(cfg).dump() + "\n";
    for (const auto& r : o.audit) nd += r.to_json().dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
    write_file(out_dir / "crews_audit.ndjson", nd);
  }
  return o;
}

// ---- report -------------------------------------------------------------------------

ReportRow row_from_report(const json& report, std::string label) {
  try {
    const auto& f = report.at("final");
    return {std::move(label), f.at("branches").get<std::size_t>(), f.at("states").get<std::size_t>(),
            f.at("transitions").get<std::size_t>()};
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, "not a campaign report: " + std::string(e.what()));
  }
}

std::optional<double> percent_delta(double reference, double value) {
  if (value == 0) return std::nullopt;
  return (reference - value) / value * 100.0;
}

std::string comparison_text(const std::vector<ReportRow>& rows) {
  if (rows.empty()) return {};
  std::size_t w = 5;
  for (const auto& r : rows) w = std::max(w, r.label.size());
  std::ostringstream out;
  const bool deltas = rows.size() > 1;
  out << std::left << std::setw(static_cast<int>(w)) << "run" << std::right << std::setw(10) << "branches";
  if (deltas) out << std::setw(11) << "ref+%";
  out << std::setw(8) << "states";
  if (deltas) out << std::setw(11) << "ref+%";
  out << std::setw(13) << "transitions";
  if (deltas) out << std::setw(11) << "ref+%";
  out << '\n';
  const auto& ref = rows.front();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    auto d = [&](std::size_t a, std::size_t b) { return i == 0 ? std::string("-") : fmt_delta(percent_delta(a, b)); };
    out << std::left << std::setw(static_cast<int>(w)) << r.label << std::right << std::setw(10) << r.branches;
    if (deltas) out << std::setw(11) << d(ref.branches, r.branches);
    out << std::setw(8) << r.states;
    if (deltas) out << std::setw(11) << d(ref.states, r.states);
    out << std::setw(13) << r.transitions;
    if (deltas) out << std::setw(11) << d(ref.transitions, r.transitions);
    out << '\n';
  }
  return out.str();
}

std::string comparison_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "run,branches,branches_ref_delta_pct,states,states_ref_delta_pct,transitions,transitions_ref_delta_pct\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    auto d = [&](std::size_t a, std::size_t b) -> std::string {
      if (i == 0) return "";
      auto v = percent_delta(a, b);
      if (!v) return "";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", *v);
      return buf;
    };
    const auto& ref = rows.front();
    out << r.label << ',' << r.branches << ',' << d(ref.branches, r.branches) << ',' << r.states << ','
        << d(ref.states, r.states) << ',' << r.transitions << ',' << d(ref.transitions, r.transitions) << '\n';
  }
  return out.str();
}

fs::path default_run_dir(std::uint64_t rng_seed) {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d%02d%02dT%02d%02d%02dZ-s%llu", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<unsigned long long>(rng_seed));
  return fs::path("runs") / buf;
}

// ---- argv ---------------------------------------------------------------------------

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"rtspfuzz: stateful RTSP fuzzer with retrieval-backed agent crews"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  RunConfig cfg;
  std::string gateway = "scripted";
  std::string out_path;
  std::map<std::string, std::string> p;
  bool crews_on = false;
  bool no_crews = false;
  bool cve_live = false;
  std::vector<std::string> reports;
  std::vector<std::string> labels;
  std::string csv_path;

  auto add_gateway = [&](CLI::App* sc) {
    sc->add_option("--gateway", gateway, "LLM gateway mode")->check(CLI::IsMember({"live", "scripted", "replay"}));
    sc->add_option("--script", p["script"], "scripted responder file");
    sc->add_option("--transcript", p["transcript"], "transcript to replay, or to record in live/scripted mode");
    sc->add_option("--provider", p["provider"], "provider config for live mode");
    sc->add_option("--seed", cfg.rng_seed, "rng seed");
  };
  auto add_fuzz = [&](CLI::App* sc) {
    add_gateway(sc);
    sc->add_option("--seeds", p["seeds"], "seed corpus directory")->required();
    sc->add_option("--index", p["index"], "knowledge base index");
    sc->add_option("--budget", cfg.budget, "executions");
    sc->add_flag("--crews", crews_on, "enable all agent crews");
    sc->add_flag("--no-crews", no_crews, "disable all agent crews (default)");
    sc->add_option("--top-k", cfg.top_k, "retrieved chunks per crew query");
    sc->add_option("--plateau-window", cfg.plateau_window, "executions without progress before the plateau crew runs");
    sc->add_option("--plateau-cap", cfg.plateau_cap, "plateau crew invocations per campaign");
    sc->add_option("--sample-every", cfg.sample_every, "series sampling interval");
    sc->add_option("--cve-fixture", p["cve_fixture"], "directory of NVD snapshots");
    sc->add_flag("--cve-live", cve_live, "query the NVD API");
    sc->add_option("--cve-cache", p["cve_cache"], "CVE cache directory");
    sc->add_option("--out", out_path, "run directory");
  };

  auto* ingest = app.add_subcommand("ingest", "RFC text -> propositions -> chunk store");
  add_gateway(ingest);
  ingest->add_option("--rfc", p["rfc"], "RFC text file")->required();
  ingest->add_option("--theta", cfg.theta, "similarity threshold for joining a chunk");
  ingest->add_option("--max-chunks", cfg.max_chunks, "chunk cap");
  ingest->add_option("--refine-every", cfg.refine_every, "refine chunk metadata every n members");
  ingest->add_option("--section-budget", cfg.section_budget, "section size budget in characters");
  ingest->add_option("--filter-mode", cfg.filter_mode, "paragraph filter")->check(CLI::IsMember({"rules", "model"}));
  ingest->add_option("--refine-mode", cfg.refine_mode, "chunk metadata refiner")
      ->check(CLI::IsMember({"extractive", "gateway"}));
  ingest->add_option("--out", out_path, "output directory");

  auto* index = app.add_subcommand("index", "chunk store -> vector index");
  index->add_option("--chunks", p["chunks"], "chunk store file")->required();
  index->add_option("--out", out_path, "index file (default: index.json next to the store)");

  auto* fuzzc = app.add_subcommand("fuzz", "run one campaign against the simulated server");
  add_fuzz(fuzzc);

  auto* bench = app.add_subcommand("bench", "paired baseline and crew campaigns");
  add_fuzz(bench);

  auto* report = app.add_subcommand("report", "compare campaign reports; the first is the reference");
  report->add_option("reports", reports, "report.json files")->required();
  report->add_option("--label", labels, "row labels, in report order");
  report->add_option("--csv", csv_path, "also write the table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.gateway = parse_gateway_mode(gateway);
    for (auto& [k, v] : p)
      if (!v.empty()) cfg.paths[k] = v;
    if (cve_live) cfg.paths["cve_live"] = "nvd";
    bool crews = crews_on && !no_crews;
    cfg.crews = {crews, crews, crews};

    if (*ingest) {
      cfg.subcommand = "ingest";
      fs::path dir = out_path.empty() ? default_run_dir(cfg.rng_seed) : fs::path(out_path);
      auto s = cmd_ingest(cfg, dir);
      out << "ingest: " << s.paragraphs << " paragraphs, " << s.kept << " kept, " << s.sections << " sections, "
          << s.propositions << " propositions, " << s.chunks << " chunks -> " << (dir / "chunks.json").string() << '\n';
      for (const auto& w : s.warnings) err << "warning: " << w << '\n';
    } else if (*index) {
      cfg.subcommand = "index";
      fs::path file = out_path.empty() ? fs::path(p["chunks"]).parent_path() / "index.json" : fs::path(out_path);
      auto n = cmd_index(cfg, file);
      out << "index: " << n << " entries -> " << file.string() << '\n';
    } else if (*fuzzc) {
      cfg.subcommand = "fuzz";
      fs::path dir = out_path.empty() ? default_run_dir(cfg.rng_seed) : fs::path(out_path);
      auto o = cmd_fuzz(cfg, dir);
      out << comparison_text({{crews ? "crews" : "baseline", o.stats.branches, o.stats.states, o.stats.transitions}});
      out << "executions " << o.stats.executions << ", crashes " << o.stats.crashes.size() << " -> "
          << dir.string() << '\n';
    } else if (*bench) {
      cfg.subcommand = "bench";
      fs::path dir = out_path.empty() ? default_run_dir(cfg.rng_seed) : fs::path(out_path);
      auto crew_cfg = cfg;
      crew_cfg.crews = {true, true, true};
      auto base_cfg = cfg;
      base_cfg.crews = {};
      auto c = cmd_fuzz(crew_cfg, dir / "crews");
      auto b = cmd_fuzz(base_cfg, dir / "baseline");
      std::vector<ReportRow> rows = {row_from_report(c.report, "crews"), row_from_report(b.report, "baseline")};
      auto table = comparison_text(rows);
      write_file(dir / "comparison.txt", table);
      write_file(dir / "comparison.csv", comparison_csv(rows));
      out << table;
    } else if (*report) {
      std::vector<ReportRow> rows;
      for (std::size_t i = 0; i < reports.size(); ++i) {
        json j;
        try {
          j = json::parse(read_file(reports[i]));
        } catch (const json::exception& e) {
          throw Error(Errc::InvalidArgument, reports[i] + ": " + e.what());
        }
        rows.push_back(row_from_report(j, i < labels.size() ? labels[i] : fs::path(reports[i]).parent_path().filename().string()));
      }
      out << comparison_text(rows);
      if (!csv_path.empty()) write_file(csv_path, comparison_csv(rows));
    }
  } catch (const Error& e) {
    err << "rtspfuzz: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "rtspfuzz: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "rtspfuzz: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rtspfuzz::cli
