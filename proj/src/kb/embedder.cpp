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

#include "rtspfuzz/kb/embedder.hpp"

#include <cmath>

#include "rtspfuzz/error.hpp"

namespace rtspfuzz::kb {

HashEmbedder::HashEmbedder(std::size_t dims, std::uint64_t seed) : dims_(dims), seed_(seed) {
  if (dims_ == 0) throw Error(Errc::InvalidArgument, "embedding dims must be positive");
}

std::string HashEmbedder::id() const {
  return "hash-trigram-fnv1a64/d" + std::to_string(dims_) + "/s" + std::to_string(seed_);
}

Vector HashEmbedder::embed(std::string_view text) const {
  if (text.empty()) throw Error(Errc::EmbeddingUnavailable, "cannot embed empty text");
  std::string padded;
  padded.reserve(text.size() + 2);
  padded.push_back(' ');
  for (unsigned char c : text) padded.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c + 32) : static_cast<char>(c));
  padded.push_back(' ');

  Vector v(dims_, 0.0);
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed_;
    for (std::size_t j = i; j < i + 3; ++j) {
      h ^= static_cast<unsigned char>(padded[j]);
      h *= 0x100000001b3ULL;
    }
    v[h % dims_] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = std::sqrt(dot(v, v));
  if (norm > 0)
    for (auto& x : v) x /= norm;
  return v;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += a[i] * b[i];
  return s;
}

double cosine(const Vector& a, const Vector& b) {
  double na = std::sqrt(dot(a, a));
  double nb = std::sqrt(dot(b, b));
  if (na == 0 || nb == 0) return 0;
  return dot(a, b) / (na * nb);
}

}  // namespace rtspfuzz::kb
