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

#include "rtspfuzz/kb/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rtspfuzz/error.hpp"

namespace rtspfuzz::kb {

using json = nlohmann::json;

namespace {

constexpr std::string_view kFormat = "rtspfuzz-index/1";

bool same_chunk(const rfc::Chunk& a, const rfc::Chunk& b) {
  if (a.chunk_id != b.chunk_id || a.title != b.title || a.summary != b.summary) return false;
  if (a.propositions.size() != b.propositions.size()) return false;
  for (std::size_t i = 0; i < a.propositions.size(); ++i) {
    const auto& p = a.propositions[i];
    const auto& q = b.propositions[i];
    if (p.id != q.id || p.text != q.text || p.source_section != q.source_section) return false;
  }
  return true;
}

std::vector<RetrievalResult> rank(const VectorIndex& index, std::vector<double> scores, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto& entries = index.entries();
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return entries[a].chunk_id < entries[b].chunk_id;
  };
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), better);
  std::vector<RetrievalResult> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    out.push_back({entries[order[i]].chunk_id, scores[order[i]], &entries[order[i]].chunk});
  return out;
}

template <class Kernel>
std::vector<RetrievalResult> search_with(const VectorIndex& index, const Embedder& e, std::string_view query,
                                         std::size_t k, Kernel kernel) {
  if (k == 0) throw Error(Errc::InvalidArgument, "k must be at least 1");
  if (index.size() == 0) throw Error(Errc::EmptyIndex, "index has no entries");
  if (e.id() != index.embedder_id())
    throw Error(Errc::EmbedderMismatch, "index built with " + index.embedder_id() + ", query uses " + e.id());
  auto q = e.embed(query);
  return rank(index, kernel(index.matrix(), q), k);
}

}  // namespace

bool IndexEntry::operator==(const IndexEntry& o) const {
  return chunk_id == o.chunk_id && vector == o.vector && same_chunk(chunk, o.chunk);
}

VectorIndex::VectorIndex(std::string embedder_id, std::size_t dims, std::vector<IndexEntry> entries)
    : embedder_id_(std::move(embedder_id)), dims_(dims), entries_(std::move(entries)) {
  std::set<std::string> seen;
  std::vector<Vector> rows;
  rows.reserve(entries_.size());
  for (const auto& e : entries_) {
    if (!seen.insert(e.chunk_id).second) throw Error(Errc::DuplicateChunk, "duplicate chunk id " + e.chunk_id);
    if (e.vector.size() != dims_) throw Error(Errc::InvalidArgument, "vector dims differ from index dims");
    rows.push_back(e.vector);
  }
  matrix_ = pack_rows(rows);
  matrix_.cols = dims_;
}

bool VectorIndex::operator==(const VectorIndex& o) const {
  return embedder_id_ == o.embedder_id_ && dims_ == o.dims_ && entries_ == o.entries_;
}

std::string render_chunk(const rfc::Chunk& c) {
  std::string out = c.title;
  out += '\n';
  out += c.summary;
  for (const auto& p : c.propositions) {
    out += '\n';
    out += p.text;
  }
  return out;
}

VectorIndex build_index(const std::vector<rfc::Chunk>& chunks, const Embedder& e) {
  if (chunks.empty()) throw Error(Errc::InvalidArgument, "no chunks to index");
  std::set<std::string> seen;
  std::vector<std::string> texts;
  for (const auto& c : chunks) {
    if (!seen.insert(c.chunk_id).second) throw Error(Errc::DuplicateChunk, "duplicate chunk id " + c.chunk_id);
    texts.push_back(render_chunk(c));
  }
  auto vectors = embed_batch_parallel(e, texts);
  std::vector<IndexEntry> entries;
  entries.reserve(chunks.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) entries.push_back({chunks[i].chunk_id, std::move(vectors[i]), chunks[i]});
  return VectorIndex(e.id(), e.dims(), std::move(entries));
}

std::vector<RetrievalResult> search(const VectorIndex& index, const Embedder& e, std::string_view query,
                                    std::size_t k) {
  return search_with(index, e, query, k, score_rows_parallel);
}

std::vector<RetrievalResult> search_serial(const VectorIndex& index, const Embedder& e, std::string_view query,
                                           std::size_t k) {
  return search_with(index, e, query, k, score_rows_serial);
}

ContextBundle retrieve_context(const VectorIndex& index, const Embedder& e, std::string_view query, std::size_t k) {
  ContextBundle b;
  for (const auto& r : search(index, e, query, k)) {
    b.chunk_ids.push_back(r.chunk_id);
    b.scores.push_back(r.score);
    std::string text = "## " + r.chunk->title + "\n" + r.chunk->summary + "\n";
    for (const auto& p : r.chunk->propositions) text += "- " + p.text + "\n";
    b.texts.push_back(text);
    if (!b.rendered.empty()) b.rendered += "\n";
    b.rendered += "[" + r.chunk_id + "]\n" + text;
  }
  return b;
}

void persist(const VectorIndex& index, const std::filesystem::path& path) {
  json entries = json::array();
  for (const auto& e : index.entries()) {
    json props = json::array();
    for (const auto& p : e.chunk.propositions)
      props.push_back({{"id", p.id}, {"text", p.text}, {"section", p.source_section}});
    entries.push_back({{"chunk_id", e.chunk_id},
                       {"title", e.chunk.title},
                       {"summary", e.chunk.summary},
                       {"propositions", props},
                       {"vector", e.vector}});
  }
  json doc = {{"format", kFormat}, {"embedder_id", index.embedder_id()}, {"dims", index.dims()}, {"entries", entries}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write index " + path.string());
  out << doc.dump(1) << '\n';
}

VectorIndex load(const std::filesystem::path& path, const Embedder& active) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open index " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json doc = json::parse(ss.str(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(Errc::IndexCorrupt, path.string() + " is not valid JSON");

  std::string embedder_id;
  std::size_t dims = 0;
  std::vector<IndexEntry> entries;
  try {
    if (doc.at("format").get<std::string>() != kFormat) throw Error(Errc::IndexCorrupt, "unknown index format");
    embedder_id = doc.at("embedder_id").get<std::string>();
    dims = doc.at("dims").get<std::size_t>();
    for (const auto& e : doc.at("entries")) {
      IndexEntry entry;
      entry.chunk_id = e.at("chunk_id").get<std::string>();
      entry.chunk.chunk_id = entry.chunk_id;
      entry.chunk.title = e.at("title").get<std::string>();
      entry.chunk.summary = e.at("summary").get<std::string>();
      for (const auto& p : e.at("propositions"))
        entry.chunk.propositions.push_back(
            {p.at("id").get<std::string>(), p.at("text").get<std::string>(), p.at("section").get<std::size_t>()});
      entry.vector = e.at("vector").get<Vector>();
      if (entry.vector.size() != dims) throw Error(Errc::IndexCorrupt, "vector length differs from dims");
      for (double x : entry.vector)
        if (!std::isfinite(x)) throw Error(Errc::IndexCorrupt, "non-finite vector value");
      entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::IndexCorrupt, std::string("malformed index: ") + e.what());
  }
  if (embedder_id != active.id())
    throw Error(Errc::EmbedderMismatch, "index built with " + embedder_id + ", active embedder is " + active.id());
  try {
    return VectorIndex(std::move(embedder_id), dims, std::move(entries));
  } catch (const Error& e) {
    throw Error(Errc::IndexCorrupt, e.what());
  }
}

}  // namespace rtspfuzz::kb
