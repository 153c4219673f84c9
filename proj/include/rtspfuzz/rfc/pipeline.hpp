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

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rtspfuzz/kb/embedder.hpp"
#include "rtspfuzz/llm/gateway.hpp"
#include "rtspfuzz/rfc/types.hpp"

namespace rtspfuzz::rfc {

inline constexpr std::size_t kDefaultSectionBudget = 4000;
inline constexpr std::string_view kSectionMark = "###";
inline constexpr std::string_view kParagraphMark = "---";
inline constexpr std::string_view kVerbatimMark = "@@@";

// Warnings are plain strings prefixed with a tag, e.g. "OversizeSection: ...".
using Warnings = std::vector<std::string>;

// ---- segmentation / filtering ------------------------------------------------

// Paragraphs are maximal runs of non-blank lines. A run whose lines all sit at least two
// columns deeper than the document's modal indent is verbatim: packet_example when it
// carries an RTSP start line or header lines, code_block otherwise. Throws EmptyDocument.
std::vector<Paragraph> segment(std::string_view raw_text);

enum class FilterMode { Rules, Model };

struct FilterRules {
  std::vector<std::regex> deny;            // boilerplate, matched case-insensitively
  std::vector<std::regex> allow;           // protocol vocabulary
  static FilterRules defaults();
};

bool filter_paragraph(const Paragraph& p, const FilterRules& rules);
// Gateway-backed relevance classification; verbatim paragraphs short-circuit to true and
// gateway failures fall back to the rule set.
bool filter_paragraph_model(const Paragraph& p, llm::Gateway& gw, const FilterRules& fallback, Warnings& warnings);

std::string render_paragraph(const Paragraph& p);
std::vector<Section> assemble_sections(const std::vector<Paragraph>& kept, std::size_t budget, Warnings& warnings);

// ---- propositions -------------------------------------------------------------

const llm::json& propositions_schema();
llm::ChatRequest proposition_request(const Section& s);

// Throws PropositionParseFailure when the gateway never produces schema-valid output.
std::vector<Proposition> propositionalize(const Section& s, llm::Gateway& gw, Warnings& warnings);

// ---- chunking -----------------------------------------------------------------

// Similarity in [0,1].
using Similarity = std::function<double(std::string_view, std::string_view)>;

// max(0, cosine) over an embedder, memoizing vectors by text.
class EmbeddingSimilarity {
 public:
  explicit EmbeddingSimilarity(std::shared_ptr<const kb::Embedder> e) : embedder_(std::move(e)) {}
  double operator()(std::string_view a, std::string_view b);
  Similarity as_function();

 private:
  const kb::Vector& vec(std::string_view s);
  std::shared_ptr<const kb::Embedder> embedder_;
  std::unordered_map<std::string, kb::Vector> cache_;
};

// Index of the chunk with the highest sim(p.text, summary), ties to the lowest chunk_id.
std::optional<std::size_t> chunk_argmax(const Proposition& p, const std::vector<Chunk>& chunks, const Similarity& sim,
                                        double* best_score = nullptr);
// Chunk id of the argmax when it clears theta.
std::optional<std::string> chunk_select(const Proposition& p, const std::vector<Chunk>& chunks,
                                        const Similarity& sim, const ChunkerConfig& cfg);

class Refiner {
 public:
  virtual ~Refiner() = default;
  virtual void refine(Chunk& c, Warnings& warnings) = 0;
};

// Title and summary from the model. Failures leave the chunk untouched.
class GatewayRefiner final : public Refiner {
 public:
  explicit GatewayRefiner(llm::Gateway& gw) : gw_(gw) {}
  void refine(Chunk& c, Warnings& warnings) override;

 private:
  llm::Gateway& gw_;
};

// Offline stand-in: summary is the first eight propositions joined by spaces, title is
// the leading six words of the first proposition.
class ExtractiveRefiner final : public Refiner {
 public:
  void refine(Chunk& c, Warnings& warnings) override;
};

Chunk refine_metadata(Chunk chunk, Refiner& refiner, Warnings& warnings);

std::string chunk_id_for(std::size_t ordinal);  // 1 -> "chunk_0001"

// Sequential greedy assignment. New chunks start with the proposition as title and
// summary, then get refined; existing chunks are refined every refine_every members.
std::vector<Chunk> run_agentic_chunking(const std::vector<Proposition>& props, Refiner& refiner,
                                        const Similarity& sim, const ChunkerConfig& cfg, Warnings& warnings);

// ---- chunk store ----------------------------------------------------------------

// {"chunk_0001": {"title", "summary", "propositions": [text, ...]}, ...}
llm::json chunk_store_json(const std::vector<Chunk>& chunks);
void write_chunk_store(const std::vector<Chunk>& chunks, const std::filesystem::path& path);
// Proposition ids are rebuilt as "<chunk_id>/p<n>".
std::vector<Chunk> read_chunk_store(const std::filesystem::path& path);
// Checks the exact store shape; returns the first problem found.
std::optional<std::string> check_chunk_store_shape(const llm::json& doc);

// ---- end to end -------------------------------------------------------------------

enum class RefineMode { Gateway, Extractive };

struct IngestConfig {
  ChunkerConfig chunker;
  std::size_t section_budget = kDefaultSectionBudget;
  FilterMode filter_mode = FilterMode::Rules;
  RefineMode refine_mode = RefineMode::Gateway;
};

struct IngestResult {
  std::vector<Paragraph> paragraphs;
  std::vector<Paragraph> kept;
  std::vector<Section> sections;
  std::vector<Proposition> propositions;
  std::vector<Chunk> chunks;
  Warnings warnings;
};

IngestResult run_ingest(std::string_view raw_text, llm::Gateway& gw, std::shared_ptr<const kb::Embedder> embedder,
                        const IngestConfig& cfg);

}  // namespace rtspfuzz::rfc
