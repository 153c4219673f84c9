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
#include <string>
#include <vector>

#include "rtspfuzz/kb/embedder.hpp"
#include "rtspfuzz/kb/kernels.hpp"
#include "rtspfuzz/rfc/types.hpp"

namespace rtspfuzz::kb {

inline constexpr std::size_t kDefaultTopK = 4;

struct IndexEntry {
  std::string chunk_id;
  Vector vector;
  rfc::Chunk chunk;

  bool operator==(const IndexEntry& o) const;
};

class VectorIndex {
 public:
  VectorIndex() = default;
  VectorIndex(std::string embedder_id, std::size_t dims, std::vector<IndexEntry> entries);

  const std::string& embedder_id() const noexcept { return embedder_id_; }
  std::size_t dims() const noexcept { return dims_; }
  const std::vector<IndexEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const Matrix& matrix() const noexcept { return matrix_; }

  bool operator==(const VectorIndex& o) const;

 private:
  std::string embedder_id_;
  std::size_t dims_ = 0;
  std::vector<IndexEntry> entries_;
  Matrix matrix_;
};

struct RetrievalResult {
  std::string chunk_id;
  double score = 0;
  const rfc::Chunk* chunk = nullptr;  // points into the index
};

struct ContextBundle {
  std::vector<std::string> chunk_ids;
  std::vector<double> scores;
  std::vector<std::string> texts;
  std::string rendered;
};

// title, summary, then one proposition per line
std::string render_chunk(const rfc::Chunk& c);

// Throws DuplicateChunk, InvalidArgument (empty input).
VectorIndex build_index(const std::vector<rfc::Chunk>& chunks, const Embedder& e);

// Exact scan. Results sorted by descending score, then ascending chunk_id.
std::vector<RetrievalResult> search(const VectorIndex& index, const Embedder& e, std::string_view query,
                                    std::size_t k = kDefaultTopK);
std::vector<RetrievalResult> search_serial(const VectorIndex& index, const Embedder& e, std::string_view query,
                                           std::size_t k = kDefaultTopK);

ContextBundle retrieve_context(const VectorIndex& index, const Embedder& e, std::string_view query,
                               std::size_t k = kDefaultTopK);

// JSON container {"format", "embedder_id", "dims", "entries": [...]}.
void persist(const VectorIndex& index, const std::filesystem::path& path);
// Throws IndexCorrupt on unreadable content, EmbedderMismatch when the stored embedder
// differs from `active`.
VectorIndex load(const std::filesystem::path& path, const Embedder& active);

}  // namespace rtspfuzz::kb
