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

#include <cstdlib>
#include <fstream>

#include "rtspfuzz/llm/gateway.hpp"
#include "support.hpp"

using namespace rtspfuzz;
using namespace rtspfuzz::llm;

namespace {

ChatRequest request(std::string task, std::string user) {
  ChatRequest r;
  r.task = std::move(task);
  r.system_prompt = "sys";
  r.user_prompt = std::move(user);
  return r;
}

const json kSchema = {{"type", "object"},
                      {"required", {"methods"}},
                      {"properties", {{"methods", {{"type", "array"}, {"minItems", 1}, {"items", {{"type", "string"}}}}}}}};

std::shared_ptr<FunctionProvider> sequence(std::vector<std::string> outs, int* calls) {
  auto shared = std::make_shared<std::vector<std::string>>(std::move(outs));
  return std::make_shared<FunctionProvider>("seq", [shared, calls](const ChatRequest&) {
    auto i = static_cast<std::size_t>((*calls)++);
    return (*shared)[std::min(i, shared->size() - 1)];
  });
}

}  // namespace

TEST_CASE("scripted responder matches task and substrings in order") {
  auto doc = json::parse(R"({"strict": true, "entries": [
    {"match": {"task": "a", "user_contains": ["alpha"]}, "response": "first", "times": 1},
    {"match": {"task": "a"}, "response": {"k": 1}},
    {"match": {"system_contains": ["sys"]}, "response": "fallback"}]})");
  auto sr = ScriptedResponder::from_json(doc);
  CHECK(sr->complete(request("a", "alpha beta")) == "first");
  CHECK(sr->complete(request("a", "alpha beta")) == R"({"k":1})");
  CHECK(sr->complete(request("b", "x")) == "fallback");
  CHECK(sr->calls() == 3);
}

TEST_CASE("strict scripted responder refuses unmatched requests") {
  ScriptedResponder strict({{{"t", {}, {"needle"}}, "ok", 0}}, true);
  CHECK_THROWS_AS(strict.complete(request("t", "hay")), Error);
  ScriptedResponder lax({{{"t", {}, {"needle"}}, "ok", 0}}, false);
  CHECK(lax.complete(request("t", "hay")).empty());
}

TEST_CASE("schema validation") {
  CHECK_FALSE(validate_schema(json{{"methods", {"PLAY"}}}, kSchema));
  CHECK(validate_schema(json{{"methods", json::array()}}, kSchema));
  CHECK(validate_schema(json{{"other", 1}}, kSchema));
  CHECK(validate_schema(json{{"methods", {1}}}, kSchema));
  json closed = {{"type", "object"}, {"additionalProperties", false}, {"properties", {{"a", {{"enum", {1, 2}}}}}}};
  CHECK_FALSE(validate_schema(json{{"a", 2}}, closed));
  CHECK(validate_schema(json{{"a", 3}}, closed));
  CHECK(validate_schema(json{{"b", 1}}, closed));
}

TEST_CASE("extract_json finds values in chatty text") {
  CHECK(*extract_json(R"({"a":1})") == json{{"a", 1}});
  CHECK(*extract_json("Sure:\n```json\n{\"a\": 2}\n```\nDone.") == json{{"a", 2}});
  CHECK(*extract_json("here you go {\"a\": [3]} thanks") == json{{"a", {3}}});
  CHECK(*extract_json("list: [1, 2]") == json::array({1, 2}));
  CHECK_FALSE(extract_json("nothing here"));
}

TEST_CASE("complete_structured retries invalid output") {
  int calls = 0;
  Gateway gw(sequence({"garbage", R"({"methods": []})", R"({"methods": ["PLAY"]})"}, &calls));
  auto resp = gw.complete_structured(request("t", "u"), kSchema);
  CHECK(calls == 3);
  CHECK(resp.retries == 2);
  CHECK(resp.parsed->at("methods")[0] == "PLAY");
}

TEST_CASE("complete_structured surfaces the last raw output") {
  int calls = 0;
  Gateway gw(sequence({"bad one", "bad two"}, &calls), {2, std::chrono::milliseconds{0}});
  try {
    gw.complete_structured(request("t", "u"), kSchema);
    FAIL("expected SchemaViolationError");
  } catch (const SchemaViolationError& e) {
    CHECK(e.code() == Errc::SchemaViolation);
    CHECK(e.last_raw() == "bad two");
  }
  CHECK(calls == 2);
}

TEST_CASE("gateway argument errors") {
  CHECK_THROWS_AS(Gateway(nullptr), Error);
  int calls = 0;
  Gateway gw(sequence({"x"}, &calls));
  ChatRequest empty;
  CHECK_THROWS_AS(gw.complete(empty), Error);
  CHECK_THROWS_AS(gw.complete_structured(request("t", "u"), json::object()), Error);
  CHECK(calls == 0);
}

TEST_CASE("output is truncated to max_output") {
  int calls = 0;
  Gateway gw(sequence({"abcdefgh"}, &calls));
  auto r = request("t", "u");
  r.max_output = 3;
  CHECK(gw.complete(r).text == "abc");
}

TEST_CASE("live transport failures are retried, deterministic ones are not") {
  int n = 0;
  auto flaky = std::make_shared<FunctionProvider>(
      "flaky",
      [&n](const ChatRequest&) -> std::string {
        if (++n < 3) throw Error(Errc::GatewayUnavailable, "down");
        return "up";
      },
      false);
  Gateway gw(flaky, {3, std::chrono::milliseconds{1}});
  CHECK(gw.complete(request("t", "u")).text == "up");
  CHECK(n == 3);

  int m = 0;
  auto det = std::make_shared<FunctionProvider>("det", [&m](const ChatRequest&) -> std::string {
    ++m;
    throw Error(Errc::GatewayUnavailable, "down");
  });
  Gateway gd(det, {3, std::chrono::milliseconds{1}});
  CHECK_THROWS_AS(gd.complete(request("t", "u")), Error);
  CHECK(m == 1);
}

TEST_CASE("request hash covers every canonical field") {
  auto base = request("t", "u");
  auto h = request_hash(base);
  CHECK(request_hash(base) == h);
  CHECK(request_hash_hex(base).size() == 16);
  auto a = base;
  a.user_prompt = "v";
  auto b = base;
  b.temperature = 0.5;
  auto c = base;
  c.schema = kSchema;
  auto d = base;
  d.task = "s";
  for (const auto& r : {a, b, c, d}) CHECK(request_hash(r) != h);
  auto e = base;
  e.timeout = std::chrono::milliseconds{1};
  CHECK(request_hash(e) == h);
}

TEST_CASE("record then replay serves identical responses") {
  testsupport::TempDir dir("llm_replay");
  auto path = dir.path() / "t.ndjson";
  int calls = 0;
  RecordingProvider rec(sequence({"one", "two"}, &calls), path);
  CHECK(rec.complete(request("t", "u")) == "one");
  CHECK(rec.complete(request("t", "u")) == "two");
  CHECK(rec.complete(request("t", "w")) == "two");

  ReplayProvider rp(path);
  CHECK(rp.complete(request("t", "u")) == "one");
  CHECK(rp.complete(request("t", "w")) == "two");
  CHECK(rp.complete(request("t", "u")) == "two");
  try {
    rp.complete(request("t", "u"));
    FAIL("expected ReplayMiss");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ReplayMiss);
  }
  ReplayProvider none(dir.path() / "absent.ndjson");
  CHECK_THROWS_AS(none.complete(request("t", "u")), Error);
}

TEST_CASE("http provider fails fast without network") {
  HttpProviderConfig cfg;
  cfg.endpoint = "http://127.0.0.1:9";
  cfg.api_key_env = "RTSPFUZZ_TEST_KEY_THAT_IS_NOT_SET";
  HttpChatProvider p(cfg);
  auto r = request("t", "u");
  r.timeout = std::chrono::milliseconds{0};
  try {
    p.complete(r);
    FAIL("expected timeout");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GatewayTimeout);
  }
  r.timeout = std::chrono::milliseconds{1000};
  try {
    p.complete(r);
    FAIL("expected unavailable");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GatewayUnavailable);
  }
  CHECK_THROWS_AS(HttpChatProvider(HttpProviderConfig{}), Error);
}
