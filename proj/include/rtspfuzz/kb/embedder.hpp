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
#include <string>
#include <string_view>
#include <vector>

namespace rtspfuzz::kb {

using Vector = std::vector<double>;

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dims() const = 0;
  // Throws EmbeddingUnavailable on empty text or provider failure.
  virtual Vector embed(std::string_view text) const = 0;
};

// Feature hashing of character trigrams. The text is lower-cased and padded with one
// space on each side; each trigram hashes with seeded FNV-1a 64 into a bucket and the top
// bit picks the sign. The result is L2-normalized.
class HashEmbedder final : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dims = 256, std::uint64_t seed = 0x5EED);
  std::string id() const override;
  std::size_t dims() const override { return dims_; }
  Vector embed(std::string_view text) const override;

 private:
  std::size_t dims_;
  std::uint64_t seed_;
};

double dot(const Vector& a, const Vector& b);
// Cosine of two arbitrary vectors; 0 when either has zero norm.
double cosine(const Vector& a, const Vector& b);

}  // namespace rtspfuzz::kb
