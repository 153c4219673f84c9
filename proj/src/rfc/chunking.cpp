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

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rtspfuzz/error.hpp"
#include "rtspfuzz/prompts.hpp"
#include "rtspfuzz/rfc/pipeline.hpp"

namespace rtspfuzz::rfc {

using llm::json;

const kb::Vector& EmbeddingSimilarity::vec(std::string_view s) {
  auto key = std::string(s);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, embedder_->embed(s)).first;
  return it->second;
}

double EmbeddingSimilarity::operator()(std::string_view a, std::string_view b) {
  const auto& va = vec(a);
  const auto& vb = vec(b);
  return std::max(0.0, kb::cosine(va, vb));
}

Similarity EmbeddingSimilarity::as_function() {
  return [this](std::string_view a, std::string_view b) { return (*this)(a, b); };
}

std::optional<std::size_t> chunk_argmax(const Proposition& p, const std::vector<Chunk>& chunks, const Similarity& sim,
                                        double* best_score) {
  std::optional<std::size_t> best;
  double best_sim = 0;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    double s = sim(p.text, chunks[i].summary);
    if (!best || s > best_sim || (s == best_sim && chunks[i].chunk_id < chunks[*best].chunk_id)) {
      best = i;
      best_sim = s;
    }
  }
  if (best_score) *best_score = best_sim;
  return best;
}

std::optional<std::string> chunk_select(const Proposition& p, const std::vector<Chunk>& chunks, const Similarity& sim,
                                        const ChunkerConfig& cfg) {
  double score = 0;
  auto best = chunk_argmax(p, chunks, sim, &score);
  if (!best || score < cfg.theta) return std::nullopt;
  return chunks[*best].chunk_id;
}

void GatewayRefiner::refine(Chunk& c, Warnings& warnings) {
  static const json schema = {
      {"type", "object"},
      {"required", {"title", "summary"}},
      {"properties", {{"title", {{"type", "string"}}}, {"summary", {{"type", "string"}}}}},
  };
  llm::ChatRequest req;
  req.task = "rfc.refine";
  req.system_prompt = std::string(prompt_asset("refine"));
  std::string user = "Current title: " + c.title + "\nCurrent summary: " + c.summary + "\nPropositions:\n";
  for (const auto& p : c.propositions) user += "- " + p.text + "\n";
  req.user_prompt = std::move(user);
  try {
    auto parsed = *gw_.complete_structured(req, schema).parsed;
    auto title = parsed["title"].get<std::string>();
    auto summary = parsed["summary"].get<std::string>();
    if (title.empty() || summary.empty()) {
      warnings.push_back("RefinementSkipped: " + c.chunk_id + ": empty title or summary");
      return;
    }
    c.title = std::move(title);
    c.summary = std::move(summary);
  } catch (const Error& e) {
    warnings.push_back("RefinementSkipped: " + c.chunk_id + ": " + e.what());
  }
}

void ExtractiveRefiner::refine(Chunk& c, Warnings&) {
  if (c.propositions.empty()) return;
  std::string summary;
  for (std::size_t i = 0; i < c.propositions.size() && i < 8; ++i) {
    if (i) summary += ' ';
    summary += c.propositions[i].text;
  }
  std::istringstream words(c.propositions.front().text);
  std::string title, w;
  for (int n = 0; n < 6 && words >> w; ++n) title += (n ? " " : "") + w;
  c.summary = std::move(summary);
  c.title = title.empty() ? c.chunk_id : title;
}

Chunk refine_metadata(Chunk chunk, Refiner& refiner, Warnings& warnings) {
  if (chunk.propositions.empty()) throw Error(Errc::InvalidArgument, "cannot refine an empty chunk");
  refiner.refine(chunk, warnings);
  return chunk;
}

std::string chunk_id_for(std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "chunk_%04zu", ordinal);
  return buf;
}

std::vector<Chunk> run_agentic_chunking(const std::vector<Proposition>& props, Refiner& refiner, const Similarity& sim,
                                        const ChunkerConfig& cfg, Warnings& warnings) {
  if (cfg.theta < 0 || cfg.theta > 1) throw Error(Errc::InvalidArgument, "theta must lie in [0,1]");
  if (cfg.max_chunks < 1) throw Error(Errc::InvalidArgument, "max_chunks must be at least 1");
  if (props.empty()) throw Error(Errc::InvalidArgument, "no propositions to chunk");
  const std::size_t every = cfg.refine_every == 0 ? 1 : cfg.refine_every;

  std::vector<Chunk> chunks;
  for (const auto& p : props) {
    double score = 0;
    auto best = chunk_argmax(p, chunks, sim, &score);
    std::size_t target;
    if (best && score >= cfg.theta) {
      target = *best;
    } else if (chunks.size() < cfg.max_chunks) {
      Chunk c{chunk_id_for(chunks.size() + 1), p.text, p.text, {p}};
      refiner.refine(c, warnings);
      chunks.push_back(std::move(c));
      continue;
    } else {
      target = *best;  // cap reached: nearest chunk regardless of theta
    }
    auto& c = chunks[target];
    c.propositions.push_back(p);
    if (c.propositions.size() % every == 0) refiner.refine(c, warnings);
  }
  return chunks;
}

json chunk_store_json(const std::vector<Chunk>& chunks) {
  json doc = json::object();
  for (const auto& c : chunks) {
    json props = json::array();
    for (const auto& p : c.propositions) props.push_back(p.text);
    doc[c.chunk_id] = {{"title", c.title}, {"summary", c.summary}, {"propositions", props}};
  }
  return doc;
}

void write_chunk_store(const std::vector<Chunk>& chunks, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write chunk store " + path.string());
  out << chunk_store_json(chunks).dump(2) << '\n';
}

std::optional<std::string> check_chunk_store_shape(const json& doc) {
  if (!doc.is_object()) return "top level is not an object";
  for (const auto& [id, c] : doc.items()) {
    if (!c.is_object()) return id + ": not an object";
    if (c.size() != 3) return id + ": expected exactly title, summary, propositions";
    if (!c.contains("title") || !c["title"].is_string() || c["title"].get<std::string>().empty())
      return id + ": bad title";
    if (!c.contains("summary") || !c["summary"].is_string() || c["summary"].get<std::string>().empty())
      return id + ": bad summary";
    if (!c.contains("propositions") || !c["propositions"].is_array() || c["propositions"].empty())
      return id + ": bad propositions";
    for (const auto& p : c["propositions"])
      if (!p.is_string()) return id + ": non-string proposition";
  }
  return std::nullopt;
}

std::vector<Chunk> read_chunk_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open chunk store " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto doc = json::parse(ss.str(), nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::InvalidArgument, path.string() + " is not valid JSON");
  if (auto err = check_chunk_store_shape(doc)) throw Error(Errc::InvalidArgument, "chunk store: " + *err);
  std::vector<Chunk> out;
  for (const auto& [id, c] : doc.items()) {
    Chunk chunk{id, c["title"].get<std::string>(), c["summary"].get<std::string>(), {}};
    std::size_t n = 0;
    for (const auto& p : c["propositions"])
      chunk.propositions.push_back({id + "/p" + std::to_string(++n), p.get<std::string>(), 0});
    out.push_back(std::move(chunk));
  }
  return out;
}

IngestResult run_ingest(std::string_view raw_text, llm::Gateway& gw, std::shared_ptr<const kb::Embedder> embedder,
                        const IngestConfig& cfg) {
  IngestResult r;
  r.paragraphs = segment(raw_text);
  auto rules = FilterRules::defaults();
  for (const auto& p : r.paragraphs) {
    bool keep = cfg.filter_mode == FilterMode::Model ? filter_paragraph_model(p, gw, rules, r.warnings)
                                                     : filter_paragraph(p, rules);
    if (keep) r.kept.push_back(p);
  }
  r.sections = assemble_sections(r.kept, cfg.section_budget, r.warnings);
  for (const auto& s : r.sections) {
    try {
      auto props = propositionalize(s, gw, r.warnings);
      r.propositions.insert(r.propositions.end(), props.begin(), props.end());
    } catch (const Error& e) {
      if (e.code() != Errc::PropositionParseFailure) throw;
      r.warnings.push_back(std::string("SectionSkipped: ") + e.what());
    }
  }
  if (r.propositions.empty()) return r;
  EmbeddingSimilarity sim(std::move(embedder));
  GatewayRefiner gateway_refiner(gw);
  ExtractiveRefiner extractive;
  Refiner& refiner = cfg.refine_mode == RefineMode::Gateway ? static_cast<Refiner&>(gateway_refiner) : extractive;
  r.chunks = run_agentic_chunking(r.propositions, refiner, sim.as_function(), cfg.chunker, r.warnings);
  return r;
}

}  // namespace rtspfuzz::rfc
