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

#include "rtspfuzz/error.hpp"
#include "rtspfuzz/rtsp/fsm.hpp"
#include "rtspfuzz/rtsp/grammar.hpp"
#include "rtspfuzz/rtsp/message.hpp"
#include "rtspfuzz/rtsp/seed.hpp"
#include "support.hpp"

using namespace rtspfuzz;
using namespace rtspfuzz::rtsp;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("parse_request reads the request line, headers and body") {
  auto r = parse_request("SETUP rtsp://h/s/track1 RTSP/1.0\r\nCSeq: 3\r\nTransport: RTP/AVP;unicast\r\n\r\n");
  CHECK(r.method == "SETUP");
  CHECK(r.known_method() == Method::Setup);
  CHECK(r.uri == "rtsp://h/s/track1");
  CHECK(r.cseq() == 3);
  CHECK(*r.headers.find("transport") == "RTP/AVP;unicast");
  CHECK(r.body.empty());
}

TEST_CASE("pause request with CSeq 5 and Session 000022B8") {
  auto r = parse_request("PAUSE rtsp://127.0.0.1:8554/wavAudioTest/ RTSP/1.0\r\nCSeq: 5\r\nSession: 000022B8\r\n\r\n");
  CHECK(r.known_method() == Method::Pause);
  CHECK(r.cseq() == 5);
  CHECK(*r.headers.find("Session") == "000022B8");
}

TEST_CASE("body is read per Content-Length") {
  auto r = parse_request("SET_PARAMETER * RTSP/1.0\r\nCSeq: 2\r\nContent-Length: 12\r\n\r\nscale: 1.0\r\n");
  CHECK(r.body == "scale: 1.0\r\n");
}

TEST_CASE("strict parse rejects bad input") {
  CHECK(code_of([] { parse_request(""); }) == Errc::MalformedRequest);
  CHECK(code_of([] { parse_request("PLAY\r\n\r\n"); }) == Errc::MalformedRequest);
  CHECK(code_of([] { parse_request("FROB * RTSP/1.0\r\nCSeq: 1\r\n\r\n"); }) == Errc::UnknownMethod);
  CHECK(code_of([] { parse_request("PLAY * RTSP/1.0\r\nno colon here\r\n\r\n"); }) == Errc::MalformedRequest);
  CHECK(code_of([] { parse_request("PLAY * RTSP/1.0\r\nCSeq: 1\r\n\r\nextra"); }) == Errc::MalformedRequest);
}

TEST_CASE("lenient parse flags instead of throwing") {
  auto p = parse_request_lenient("FROB * RTSP/1.0\nCSeq: 1\nContent-Length: 9\n\nabc");
  CHECK_FALSE(p.known_method);
  CHECK(p.lf_normalized);
  CHECK(p.truncated_body);
  CHECK(p.request.method == "FROB");
  auto q = parse_request_lenient("PLAY * RTSP/1.0\r\nCSeq: 1\r\n\r\ntrailing");
  CHECK(q.trailing_bytes);
}

TEST_CASE("serialize adds Content-Length for a body") {
  auto r = make_request(Method::GetParameter, "rtsp://h/s", {{"CSeq", "7"}}, "position\r\n");
  CHECK(serialize(r) == "GET_PARAMETER rtsp://h/s RTSP/1.0\r\nCSeq: 7\r\nContent-Length: 10\r\n\r\nposition\r\n");
  CHECK(parse_request(serialize(r)).body == r.body);
}

TEST_CASE("fixture corpus round-trips byte for byte") {
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(testsupport::fixture("corpus"))) {
    auto raw = testsupport::slurp(e.path());
    CAPTURE(e.path().filename().string());
    if (raw.starts_with("RTSP/"))
      CHECK(serialize(parse_response(raw)) == raw);
    else
      CHECK(serialize(parse_request(raw)) == raw);
    ++n;
  }
  CHECK(n == 20);
}

TEST_CASE("status codes and reasons") {
  CHECK(reason_phrase(454) == "Session Not Found");
  CHECK(reason_phrase(455) == "Method Not Valid in This State");
  auto r = parse_response("RTSP/1.0 461 Unsupported Transport\r\nCSeq: 3\r\n\r\n");
  CHECK(r.status == 461);
  CHECK(is_status_line("RTSP/1.0 200 OK"));
  CHECK_FALSE(is_request_line("RTSP/1.0 200 OK"));
  CHECK(is_request_line("PLAY * RTSP/1.0\r"));
}

TEST_CASE("fsm anchored transitions") {
  using enum State;
  auto ok = StatusClass::Success;
  CHECK(fsm_next(Init, Method::Setup, ok) == Ready);
  CHECK(fsm_next(Ready, Method::Play, ok) == Playing);
  CHECK(fsm_next(Playing, Method::Pause, ok) == Ready);
  CHECK(fsm_next(Recording, Method::Pause, ok) == Ready);
  CHECK(fsm_next(Ready, Method::Record, ok) == Recording);
  for (auto s : kAllStates) CHECK(fsm_next(s, Method::Teardown, ok) == Init);
  CHECK(fsm_next(Playing, Method::Pause, StatusClass::ClientError) == Playing);
  CHECK(fsm_next(Init, Method::Options, ok) == Init);
  CHECK_FALSE(fsm_allows(Init, Method::Play));
  CHECK_FALSE(fsm_allows(Init, Method::Teardown));
  CHECK(fsm_allows(Ready, Method::Setup));
}

TEST_CASE("property: non-2xx never moves the state") {
  for (auto s : kAllStates)
    for (auto m : kAllMethods)
      for (auto c : {StatusClass::Informational, StatusClass::Redirection, StatusClass::ClientError,
                     StatusClass::ServerError})
        CHECK(fsm_next(s, m, c) == s);
}

TEST_CASE("template text parse and render") {
  std::string text =
      "1. DESCRIBE <<VALUE>> RTSP/1.0\\r\\n\nCSeq: <<VALUE>>\\r\\n\nAccept: <<VALUE>>\\r\\n\n\n"
      "2. PLAY <<VALUE>> RTSP/1.0\\r\\n\nCSeq: <<VALUE>>\\r\\n\nSession: <<VALUE>>\\r\\n\n";
  auto ts = parse_template_text(text);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].method == Method::Describe);
  CHECK(ts[1].lines[2] == "Session: <<VALUE>>");
  CHECK(ts[1].placeholder_count() == 3);
  CHECK(parse_template_text(render_template_text(ts)) == ts);
}

TEST_CASE("template instantiation binds placeholders in order") {
  auto t = parse_template_text("1. PLAY <<VALUE>> RTSP/1.0\nCSeq: <<VALUE>>\nSession: <<VALUE>>\n").front();
  std::vector<std::string> b = {"rtsp://h/s", "4", "000022B8"};
  auto r = instantiate_template(t, b);
  CHECK(serialize(r) == "PLAY rtsp://h/s RTSP/1.0\r\nCSeq: 4\r\nSession: 000022B8\r\n\r\n");
  std::vector<std::string> short_b = {"x"};
  CHECK(code_of([&] { instantiate_template(t, short_b); }) == Errc::BindingArity);
}

TEST_CASE("template format errors") {
  CHECK(code_of([] { parse_template_text("2. PLAY <<VALUE>> RTSP/1.0\n\n1. PAUSE <<VALUE>> RTSP/1.0\n"); }) ==
        Errc::TemplateFormatError);
  CHECK(code_of([] { parse_template_text("1. FROB <<VALUE>> RTSP/1.0\n"); }) == Errc::TemplateFormatError);
  CHECK(code_of([] { parse_template_text("1. PLAY <<VALUE>> RTSP/1.0\nnot a header\n"); }) == Errc::TemplateFormatError);
}

TEST_CASE("seed parsing drops responses and keeps requests") {
  std::string bytes =
      "OPTIONS * RTSP/1.0\r\nCSeq: 1\r\n\r\n"
      "RTSP/1.0 200 OK\r\nCSeq: 1\r\n\r\n"
      "SETUP rtsp://h/s RTSP/1.0\r\nCSeq: 2\r\nTransport: RTP/AVP\r\n\r\n";
  auto r = parse_seed(bytes);
  REQUIRE(r.seed.requests.size() == 2);
  CHECK(r.seed.requests[1].known_method() == Method::Setup);
  CHECK(r.warnings.size() == 1);
  CHECK(serialize_seed(r.seed) == "OPTIONS * RTSP/1.0\r\nCSeq: 1\r\n\r\nSETUP rtsp://h/s RTSP/1.0\r\nCSeq: 2\r\nTransport: RTP/AVP\r\n\r\n");
  CHECK(code_of([] { parse_seed("garbage"); }) == Errc::EmptySeed);
}

TEST_CASE("shipped seeds parse and walk the state machine") {
  for (const auto& e : std::filesystem::directory_iterator(testsupport::asset("seeds"))) {
    auto r = parse_seed(testsupport::slurp(e.path()));
    CHECK(r.warnings.empty());
    State s = State::Init;
    for (const auto& req : r.seed.requests) {
      REQUIRE(req.known_method());
      CHECK(fsm_allows(s, *req.known_method()));
      s = fsm_next(s, *req.known_method(), StatusClass::Success);
    }
  }
}
