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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "rtspfuzz/kb/index.hpp"
#include "rtspfuzz/rfc/pipeline.hpp"
#include "support.hpp"

using namespace rtspfuzz;
using namespace rtspfuzz::kb;
using testsupport::fixture;
using testsupport::load_json;

namespace {

std::vector<rfc::Chunk> fixture_store(const testsupport::TempDir& dir) {
  auto doc = load_json(fixture("retrieval.json"));
  auto path = dir / "store.json";
  std::ofstream(path) << doc["store"].dump();
  return rfc::read_chunk_store(path);
}

std::vector<rfc::Chunk> synthetic_chunks(std::size_t n) {
  std::vector<rfc::Chunk> out;
  for (std::size_t i = 1; i <= n; ++i) {
    rfc::Chunk c;
    c.chunk_id = rfc::chunk_id_for(i);
    c.title = "topic " + std::to_string(i % 7);
    c.summary = "summary about method " + std::to_string(i * 13 % 11);
    c.propositions.push_back({c.chunk_id + "/p1", "proposition number " + std::to_string(i), 0});
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

TEST_CASE("hash embedder matches the golden vectors") {
  auto doc = load_json(fixture("embed_golden.json"));
  HashEmbedder e(doc["dims"].get<std::size_t>(), doc["seed"].get<std::uint64_t>());
  CHECK(e.dims() == 256);
  for (const auto& c : doc["cases"]) {
    auto text = c["text"].get<std::string>();
    CAPTURE(text);
    auto v = e.embed(text);
    REQUIRE(v.size() == 256);
    double norm = std::sqrt(c["norm2"].get<double>());
    Vector want(256, 0.0);
    for (const auto& [k, x] : c["nonzero"].items()) want[std::stoul(k)] = x.get<double>() / norm;
    for (std::size_t i = 0; i < 256; ++i) CHECK(v[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("embedder rejects empty text and is case-insensitive") {
  HashEmbedder e;
  CHECK_THROWS_AS(e.embed(""), Error);
  CHECK(e.embed("Session") == e.embed("SESSION"));
  CHECK(e.id() != HashEmbedder(128).id());
  CHECK(e.id() != HashEmbedder(256, 1).id());
}

TEST_CASE("cosine and dot") {
  Vector a{1, 0, 0}, b{0, 2, 0}, z{0, 0, 0};
  CHECK(dot(a, b) == 0);
  CHECK(cosine(a, a) == doctest::Approx(1));
  CHECK(cosine(a, z) == 0);
  CHECK(cosine(Vector{3, 4}, Vector{6, 8}) == doctest::Approx(1));
}

TEST_CASE("property: parallel kernels equal serial bit for bit") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (std::size_t rows : {0u, 1u, 3u, 257u}) {
    std::vector<Vector> vs(rows, Vector(64));
    for (auto& v : vs)
      for (auto& x : v) x = nd(rng);
    Vector q(64);
    for (auto& x : q) x = nd(rng);
    auto m = pack_rows(vs);
    CHECK(score_rows_serial(m, q) == score_rows_parallel(m, q));
  }
  HashEmbedder e;
  std::vector<std::string> texts;
  for (int i = 0; i < 100; ++i) texts.push_back("text " + std::to_string(i * i));
  CHECK(embed_batch_serial(e, texts) == embed_batch_parallel(e, texts));
}

TEST_CASE("search matches the frozen exact ranking") {
  testsupport::TempDir dir("kb_search");
  auto doc = load_json(fixture("retrieval.json"));
  auto chunks = fixture_store(dir);
  REQUIRE(chunks.size() == 25);
  HashEmbedder e;
  auto index = build_index(chunks, e);
  auto k = doc["k"].get<std::size_t>();
  for (const auto& ex : doc["expected"]) {
    auto q = ex["query"].get<std::string>();
    CAPTURE(q);
    std::vector<std::string> got;
    for (const auto& r : search(index, e, q, k)) got.push_back(r.chunk_id);
    CHECK(got == ex["chunk_ids"].get<std::vector<std::string>>());
  }
}

TEST_CASE("property: search equals a brute-force scan") {
  auto chunks = synthetic_chunks(60);
  HashEmbedder e;
  auto index = build_index(chunks, e);
  for (std::string q : {"method 3", "topic summary", "proposition number 42", "zzz"}) {
    auto qv = e.embed(q);
    std::vector<std::pair<double, std::string>> all;
    for (const auto& c : chunks) all.emplace_back(dot(qv, e.embed(render_chunk(c))), c.chunk_id);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (std::size_t k : {1u, 4u, 60u, 100u}) {
      auto got = search(index, e, q, k);
      auto ser = search_serial(index, e, q, k);
      REQUIRE(got.size() == std::min<std::size_t>(k, 60));
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].chunk_id == all[i].second);
        CHECK(got[i].score == all[i].first);
        CHECK(ser[i].chunk_id == got[i].chunk_id);
        CHECK(got[i].chunk->chunk_id == got[i].chunk_id);
      }
    }
  }
}

TEST_CASE("retrieve_context bundles texts in rank order") {
  auto chunks = synthetic_chunks(10);
  HashEmbedder e;
  auto index = build_index(chunks, e);
  auto b = retrieve_context(index, e, "proposition number 4", 3);
  REQUIRE(b.chunk_ids.size() == 3);
  CHECK(b.scores.size() == 3);
  CHECK(b.texts.size() == 3);
  CHECK(std::is_sorted(b.scores.rbegin(), b.scores.rend()));
  CHECK(b.rendered.find(b.texts[0]) != std::string::npos);
}

TEST_CASE("index build errors") {
  HashEmbedder e;
  CHECK_THROWS_AS(build_index({}, e), Error);
  auto chunks = synthetic_chunks(2);
  chunks[1].chunk_id = chunks[0].chunk_id;
  try {
    build_index(chunks, e);
    FAIL("expected DuplicateChunk");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::DuplicateChunk);
  }
}

TEST_CASE("persist and load round-trip") {
  testsupport::TempDir dir("kb_persist");
  HashEmbedder e;
  auto index = build_index(synthetic_chunks(12), e);
  auto path = dir / "index.json";
  persist(index, path);
  auto back = load(path, e);
  CHECK(back == index);
  CHECK(search(back, e, "topic 3", 5)[0].chunk_id == search(index, e, "topic 3", 5)[0].chunk_id);

  try {
    load(path, HashEmbedder(128));
    FAIL("expected EmbedderMismatch");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::EmbedderMismatch);
  }
  std::ofstream(dir / "bad.json") << "{\"format\": 1, \"entries\": [";
  try {
    load(dir / "bad.json", e);
    FAIL("expected IndexCorrupt");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::IndexCorrupt);
  }
}
