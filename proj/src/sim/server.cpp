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

#include "rtspfuzz/sim/server.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>

#include "rtspfuzz/error.hpp"

namespace rtspfuzz::sim {

using rtsp::Method;
using rtsp::State;

namespace probe {

// general request handling
constexpr ProbeId kMalformed = 1;
constexpr ProbeId kLfOnly = 2;
constexpr ProbeId kTruncatedBody = 3;
constexpr ProbeId kTrailingBytes = 4;
constexpr ProbeId kBadVersion = 5;
constexpr ProbeId kUnknownMethod = 6;
constexpr ProbeId kCSeqMissing = 7;
constexpr ProbeId kCSeqNotNumeric = 8;
constexpr ProbeId kCSeqNegative = 9;
constexpr ProbeId kCSeqOk = 10;
constexpr ProbeId kSessionPresent = 11;
constexpr ProbeId kSessionOverflow = 12;
constexpr ProbeId kUserAgent = 13;
constexpr ProbeId kRequire = 14;
constexpr ProbeId kAuthorization = 15;
constexpr ProbeId kUriNotRtsp = 16;
constexpr ProbeId kCSeqAfterPlayNegative = 17;
constexpr ProbeId kBodyPresent = 18;

constexpr ProbeId kDispatchBase = 100;    // + state * 10 + method
constexpr ProbeId kOutcomeBase = 200;     // + method * 10 + code slot
constexpr ProbeId kTransitionBase = 320;  // + from * 4 + to

// DESCRIBE
constexpr ProbeId kAcceptSdp = 400;
constexpr ProbeId kAcceptOther = 401;
constexpr ProbeId kDescribeNoAccept = 402;
// ANNOUNCE
constexpr ProbeId kAnnounceNoType = 410;
constexpr ProbeId kAnnounceSdp = 411;
constexpr ProbeId kAnnounceOtherType = 412;
constexpr ProbeId kAnnounceEmptyBody = 413;
// SETUP
constexpr ProbeId kTransportMissing = 420;
constexpr ProbeId kTransportRtpAvp = 421;
constexpr ProbeId kTransportUnsupported = 422;
constexpr ProbeId kTransportUnicast = 423;
constexpr ProbeId kTransportMulticast = 424;
constexpr ProbeId kClientPortOk = 425;
constexpr ProbeId kClientPortBad = 426;
constexpr ProbeId kInterleaved = 427;
constexpr ProbeId kModeRecord = 428;
constexpr ProbeId kSetupUnknownSession = 429;
constexpr ProbeId kSetupNoSessionWhileActive = 430;
constexpr ProbeId kSetupSessionMismatch = 431;
constexpr ProbeId kResetup = 432;
// session checks for session-bound methods
constexpr ProbeId kSessionMissing = 440;
constexpr ProbeId kSessionMismatch = 441;
constexpr ProbeId kSessionNoneActive = 442;
// PLAY
constexpr ProbeId kPlayRangeNpt = 450;
constexpr ProbeId kPlayRangeClock = 451;
constexpr ProbeId kPlayRangeSmpte = 452;
constexpr ProbeId kPlayRangeInvalid = 453;
constexpr ProbeId kScaleOk = 454;
constexpr ProbeId kScaleBad = 455;
constexpr ProbeId kSpeed = 456;
// GET_PARAMETER / SET_PARAMETER
constexpr ProbeId kGetParamKeepalive = 460;
constexpr ProbeId kGetParamKnown = 461;
constexpr ProbeId kGetParamUnknown = 462;
constexpr ProbeId kParamContentType = 463;
constexpr ProbeId kSetParamEmpty = 470;
constexpr ProbeId kSetParamScaleOk = 471;
constexpr ProbeId kSetParamScaleBad = 472;
constexpr ProbeId kSetParamReadOnly = 473;
constexpr ProbeId kSetParamUnknown = 474;
// RECORD / PAUSE
constexpr ProbeId kRecordRangeOk = 480;
constexpr ProbeId kRecordRangeInvalid = 481;
constexpr ProbeId kPauseFromPlaying = 482;
constexpr ProbeId kPauseFromRecording = 483;
constexpr ProbeId kTeardownKeepsNothing = 484;

constexpr std::array<int, 9> kCodes = {200, 400, 415, 451, 454, 455, 457, 458, 461};

constexpr ProbeId dispatch(State s, Method m) {
  return kDispatchBase + static_cast<ProbeId>(s) * 10 + static_cast<ProbeId>(m);
}

constexpr ProbeId outcome(Method m, int code) {
  ProbeId slot = 0;
  for (ProbeId i = 0; i < kCodes.size(); ++i)
    if (kCodes[i] == code) slot = i;
  return kOutcomeBase + static_cast<ProbeId>(m) * 10 + slot;
}

constexpr ProbeId transition(State from, State to) {
  return kTransitionBase + static_cast<ProbeId>(from) * 4 + static_cast<ProbeId>(to);
}

}  // namespace probe

namespace {

struct Outcomes {
  Method method;
  std::vector<int> codes;
};

const std::vector<Outcomes>& outcome_table() {
  static const std::vector<Outcomes> table = {
      {Method::Options, {200, 400}},
      {Method::Describe, {200, 400}},
      {Method::Announce, {200, 400, 415}},
      {Method::Setup, {200, 400, 454, 455, 461}},
      {Method::Play, {200, 400, 454, 455, 457}},
      {Method::Pause, {200, 400, 454, 455}},
      {Method::Teardown, {200, 400, 454}},
      {Method::GetParameter, {200, 400, 451, 454}},
      {Method::SetParameter, {200, 400, 451, 454, 458}},
      {Method::Record, {200, 400, 454, 455, 457}},
  };
  return table;
}

std::vector<BranchProbe> build_catalog() {
  using namespace probe;
  std::vector<BranchProbe> c = {
      {kMalformed, "request.malformed"},
      {kLfOnly, "request.lf_only"},
      {kTruncatedBody, "request.truncated_body"},
      {kTrailingBytes, "request.trailing_bytes"},
      {kBadVersion, "request.bad_version"},
      {kUnknownMethod, "request.unknown_method"},
      {kCSeqMissing, "cseq.missing"},
      {kCSeqNotNumeric, "cseq.not_numeric"},
      {kCSeqNegative, "cseq.negative"},
      {kCSeqOk, "cseq.ok"},
      {kSessionPresent, "session.present"},
      {kSessionOverflow, "session.overflow"},
      {kUserAgent, "header.user_agent"},
      {kRequire, "header.require"},
      {kAuthorization, "header.authorization"},
      {kUriNotRtsp, "uri.not_rtsp"},
      {kCSeqAfterPlayNegative, "cseq.negative_after_play"},
      {kBodyPresent, "request.body_present"},
      {kAcceptSdp, "describe.accept_sdp"},
      {kAcceptOther, "describe.accept_other"},
      {kDescribeNoAccept, "describe.no_accept"},
      {kAnnounceNoType, "announce.no_content_type"},
      {kAnnounceSdp, "announce.sdp"},
      {kAnnounceOtherType, "announce.other_type"},
      {kAnnounceEmptyBody, "announce.empty_body"},
      {kTransportMissing, "setup.transport_missing"},
      {kTransportRtpAvp, "setup.transport_rtp_avp"},
      {kTransportUnsupported, "setup.transport_unsupported"},
      {kTransportUnicast, "setup.transport_unicast"},
      {kTransportMulticast, "setup.transport_multicast"},
      {kClientPortOk, "setup.client_port_ok"},
      {kClientPortBad, "setup.client_port_bad"},
      {kInterleaved, "setup.interleaved"},
      {kModeRecord, "setup.mode_record"},
      {kSetupUnknownSession, "setup.unknown_session"},
      {kSetupNoSessionWhileActive, "setup.no_session_while_active"},
      {kSetupSessionMismatch, "setup.session_mismatch"},
      {kResetup, "setup.resetup"},
      {kSessionMissing, "session.missing"},
      {kSessionMismatch, "session.mismatch"},
      {kSessionNoneActive, "session.none_active"},
      {kPlayRangeNpt, "play.range_npt"},
      {kPlayRangeClock, "play.range_clock"},
      {kPlayRangeSmpte, "play.range_smpte"},
      {kPlayRangeInvalid, "play.range_invalid"},
      {kScaleOk, "play.scale_ok"},
      {kScaleBad, "play.scale_bad"},
      {kSpeed, "play.speed"},
      {kGetParamKeepalive, "get_parameter.keepalive"},
      {kGetParamKnown, "get_parameter.known"},
      {kGetParamUnknown, "get_parameter.unknown"},
      {kParamContentType, "parameter.content_type"},
      {kSetParamEmpty, "set_parameter.empty"},
      {kSetParamScaleOk, "set_parameter.scale_ok"},
      {kSetParamScaleBad, "set_parameter.scale_bad"},
      {kSetParamReadOnly, "set_parameter.read_only"},
      {kSetParamUnknown, "set_parameter.unknown"},
      {kRecordRangeOk, "record.range_ok"},
      {kRecordRangeInvalid, "record.range_invalid"},
      {kPauseFromPlaying, "pause.from_playing"},
      {kPauseFromRecording, "pause.from_recording"},
      {kTeardownKeepsNothing, "teardown.session_destroyed"},
  };
  for (auto s : rtsp::kAllStates)
    for (auto m : rtsp::kAllMethods)
      c.push_back({dispatch(s, m), "dispatch." + std::string(rtsp::state_name(s)) + "." +
                                       std::string(rtsp::method_name(m))});
  for (const auto& row : outcome_table())
    for (int code : row.codes)
      c.push_back({outcome(row.method, code),
                   "outcome." + std::string(rtsp::method_name(row.method)) + "." + std::to_string(code)});
  for (auto from : rtsp::kAllStates)
    for (auto to : rtsp::kAllStates)
      if (from != to)
        c.push_back({transition(from, to), "transition." + std::string(rtsp::state_name(from)) + "." +
                                               std::string(rtsp::state_name(to))});
  std::sort(c.begin(), c.end(), [](const BranchProbe& a, const BranchProbe& b) { return a.probe_id < b.probe_id; });
  return c;
}

bool contains(std::string_view hay, std::string_view needle) { return hay.find(needle) != std::string_view::npos; }

bool parse_number(std::string_view s, double& out) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

// npt=<start>-[<end>] with decimal seconds or "now"
bool valid_npt(std::string_view v) {
  auto dash = v.find('-');
  if (dash == std::string_view::npos) return false;
  auto start = v.substr(0, dash);
  auto end = v.substr(dash + 1);
  double x = 0;
  if (start != "now" && !parse_number(start, x)) return false;
  if (!end.empty() && !parse_number(end, x)) return false;
  return true;
}

std::vector<std::string_view> body_lines(std::string_view body) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto nl = body.find('\n', pos);
    auto line = body.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? body.size() : nl + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

constexpr std::array<std::string_view, 4> kKnownParams = {"position", "scale", "duration", "session_timeout"};
constexpr std::array<std::string_view, 3> kReadOnlyParams = {"position", "duration", "session_timeout"};

template <std::size_t N>
bool in(const std::array<std::string_view, N>& set, std::string_view v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

constexpr std::string_view kSdp =
    "v=0\r\n"
    "o=- 0 0 IN IP4 127.0.0.1\r\n"
    "s=sim\r\n"
    "t=0 0\r\n"
    "m=video 0 RTP/AVP 96\r\n"
    "a=control:track1\r\n";

}  // namespace

const std::vector<BranchProbe>& probe_catalog() {
  static const std::vector<BranchProbe> catalog = build_catalog();
  return catalog;
}

SimServer::SimServer(SimConfig cfg) : cfg_(cfg) {}

void SimServer::reset() {
  session_.reset();
  issued_ = 0;
  played_ = false;
  history_.clear();
}

void SimServer::reseed(std::uint32_t session_seed) {
  cfg_.session_seed = session_seed;
  reset();
}

std::string SimServer::next_session_id() {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08X", static_cast<unsigned>(cfg_.session_seed + issued_++));
  return buf;
}

HandleResult SimServer::handle_raw(std::string_view bytes) {
  std::vector<ProbeId> probes;
  rtsp::ParsedRequest parsed;
  try {
    parsed = rtsp::parse_request_lenient(bytes);
  } catch (const Error&) {
    probes.push_back(probe::kMalformed);
    history_.insert(history_.end(), probes.begin(), probes.end());
    rtsp::RtspResponse resp{400, std::string(rtsp::reason_phrase(400))};
    return {std::move(resp), std::move(probes)};
  }
  if (parsed.lf_normalized) probes.push_back(probe::kLfOnly);
  if (parsed.truncated_body) probes.push_back(probe::kTruncatedBody);
  if (parsed.trailing_bytes) probes.push_back(probe::kTrailingBytes);
  return dispatch(parsed.request, std::move(probes));
}

HandleResult SimServer::handle(const rtsp::RtspRequest& req) { return dispatch(req, {}); }

HandleResult SimServer::dispatch(const rtsp::RtspRequest& req, std::vector<ProbeId> probes) {
  auto fire = [&](ProbeId p) { probes.push_back(p); };
  rtsp::RtspResponse resp;
  const auto* cseq_raw = req.headers.find("CSeq");

  auto finish = [&](int status) {
    resp.status = status;
    resp.reason = std::string(rtsp::reason_phrase(status));
    if (cseq_raw) resp.headers.items().insert(resp.headers.items().begin(), {"CSeq", *cseq_raw});
    history_.insert(history_.end(), probes.begin(), probes.end());
    return HandleResult{std::move(resp), std::move(probes)};
  };
  auto fault = [&](Fault f, std::string sig) {
    history_.insert(history_.end(), probes.begin(), probes.end());
    return HandleResult{std::nullopt, std::move(probes), f, std::move(sig)};
  };

  if (req.version != rtsp::kVersion) {
    fire(probe::kBadVersion);
    return finish(400);
  }
  auto method = req.known_method();
  if (!method) {
    fire(probe::kUnknownMethod);
    return finish(400);
  }
  const Method m = *method;
  auto out = [&](int status) {
    fire(probe::outcome(m, status));
    return finish(status);
  };

  const auto* session_hdr = req.headers.find("Session");
  std::string_view session_id;
  if (session_hdr) {
    fire(probe::kSessionPresent);
    session_id = *session_hdr;
    session_id = session_id.substr(0, session_id.find(';'));
    if (session_hdr->size() > cfg_.session_value_limit) {
      fire(probe::kSessionOverflow);
      return fault(Fault::Crash, "B1:session-overflow:" + std::string(rtsp::method_name(m)));
    }
  }

  if (!cseq_raw) {
    fire(probe::kCSeqMissing);
    return out(400);
  }
  auto cseq = req.cseq();
  if (!cseq) {
    fire(probe::kCSeqNotNumeric);
    return out(400);
  }
  if (*cseq < 0) {
    if (played_) {
      fire(probe::kCSeqAfterPlayNegative);
      return fault(Fault::Hang, "B2:negative-cseq-after-play:" + std::string(rtsp::method_name(m)));
    }
    fire(probe::kCSeqNegative);
    return out(400);
  }
  fire(probe::kCSeqOk);

  const State from = state();
  fire(probe::dispatch(from, m));
  if (req.headers.contains("User-Agent")) fire(probe::kUserAgent);
  if (req.headers.contains("Require")) fire(probe::kRequire);
  if (req.headers.contains("Authorization")) fire(probe::kAuthorization);
  if (!req.body.empty()) fire(probe::kBodyPresent);
  if (!req.uri.starts_with("rtsp://") && req.uri != "*") {
    fire(probe::kUriNotRtsp);
    return out(400);
  }
  if (session_) session_->cseq_last = *cseq;

  auto move_to = [&](State to) {
    if (to != from) fire(probe::transition(from, to));
    if (to == State::Init) {
      session_.reset();
    } else {
      session_->state = to;
    }
  };
  auto attach_session = [&] {
    if (session_) resp.headers.add("Session", session_->session_id + ";timeout=60");
  };
  // Session-bound methods: 454 unless the header names the live session.
  auto check_session = [&]() -> bool {
    if (!session_hdr) {
      fire(probe::kSessionMissing);
      return false;
    }
    if (!session_) {
      fire(probe::kSessionNoneActive);
      return false;
    }
    if (session_id != session_->session_id) {
      fire(probe::kSessionMismatch);
      return false;
    }
    return true;
  };

  switch (m) {
    case Method::Options:
      resp.headers.add("Public",
                       "OPTIONS, DESCRIBE, ANNOUNCE, SETUP, PLAY, PAUSE, TEARDOWN, GET_PARAMETER, "
                       "SET_PARAMETER, RECORD");
      return out(200);

    case Method::Describe: {
      if (const auto* accept = req.headers.find("Accept")) {
        if (!contains(*accept, "application/sdp")) {
          fire(probe::kAcceptOther);
          return out(400);
        }
        fire(probe::kAcceptSdp);
      } else {
        fire(probe::kDescribeNoAccept);
      }
      resp.headers.add("Content-Base", req.uri + "/");
      resp.headers.add("Content-Type", "application/sdp");
      resp.body = std::string(kSdp);
      return out(200);
    }

    case Method::Announce: {
      const auto* type = req.headers.find("Content-Type");
      if (!type) {
        fire(probe::kAnnounceNoType);
        return out(400);
      }
      if (!contains(*type, "application/sdp")) {
        fire(probe::kAnnounceOtherType);
        return out(415);
      }
      fire(probe::kAnnounceSdp);
      if (req.body.empty()) {
        fire(probe::kAnnounceEmptyBody);
        return out(400);
      }
      attach_session();
      return out(200);
    }

    case Method::Setup: {
      const auto* transport = req.headers.find("Transport");
      if (!transport) {
        fire(probe::kTransportMissing);
        return out(400);
      }
      if (!contains(*transport, "RTP/AVP")) {
        fire(probe::kTransportUnsupported);
        return out(461);
      }
      fire(probe::kTransportRtpAvp);
      if (contains(*transport, "unicast")) fire(probe::kTransportUnicast);
      if (contains(*transport, "multicast")) fire(probe::kTransportMulticast);
      if (contains(*transport, "interleaved=")) fire(probe::kInterleaved);
      if (contains(*transport, "mode=record") || contains(*transport, "mode=\"RECORD\""))
        fire(probe::kModeRecord);
      if (auto cp = transport->find("client_port="); cp != std::string::npos) {
        auto ports = std::string_view(*transport).substr(cp + 12);
        ports = ports.substr(0, ports.find(';'));
        auto dash = ports.find('-');
        double lo = 0, hi = 0;
        if (dash == std::string_view::npos || !parse_number(ports.substr(0, dash), lo) ||
            !parse_number(ports.substr(dash + 1), hi) || hi != lo + 1) {
          fire(probe::kClientPortBad);
          return out(400);
        }
        fire(probe::kClientPortOk);
      }
      if (from == State::Init) {
        if (session_hdr) {
          fire(probe::kSetupUnknownSession);
          return out(454);
        }
        session_ = SimSession{next_session_id(), State::Init, *cseq};
        move_to(State::Ready);
      } else if (from == State::Ready) {
        if (!session_hdr) {
          fire(probe::kSetupNoSessionWhileActive);
          return out(455);
        }
        if (session_id != session_->session_id) {
          fire(probe::kSetupSessionMismatch);
          return out(454);
        }
        fire(probe::kResetup);
      } else {
        return out(455);
      }
      resp.headers.add("Transport", *transport + ";server_port=6970-6971");
      attach_session();
      return out(200);
    }

    case Method::Play: {
      if (!check_session()) return out(454);
      if (from != State::Ready) return out(455);
      if (const auto* range = req.headers.find("Range")) {
        std::string_view r = *range;
        if (r.starts_with("npt=") && valid_npt(r.substr(4))) {
          fire(probe::kPlayRangeNpt);
        } else if (r.starts_with("clock=")) {
          fire(probe::kPlayRangeClock);
        } else if (r.starts_with("smpte")) {
          fire(probe::kPlayRangeSmpte);
        } else {
          fire(probe::kPlayRangeInvalid);
          return out(457);
        }
        resp.headers.add("Range", *range);
      }
      if (const auto* scale = req.headers.find("Scale")) {
        double s = 0;
        if (!parse_number(*scale, s) || s == 0) {
          fire(probe::kScaleBad);
          return out(400);
        }
        fire(probe::kScaleOk);
      }
      if (req.headers.contains("Speed")) fire(probe::kSpeed);
      move_to(State::Playing);
      played_ = true;
      resp.headers.add("RTP-Info", "url=" + req.uri + "/track1;seq=1;rtptime=0");
      attach_session();
      return out(200);
    }

    case Method::Pause: {
      if (!check_session()) return out(454);
      if (from == State::Playing) {
        fire(probe::kPauseFromPlaying);
      } else if (from == State::Recording) {
        fire(probe::kPauseFromRecording);
      } else {
        return out(455);
      }
      // the session and its resources stay allocated while paused
      move_to(State::Ready);
      attach_session();
      return out(200);
    }

    case Method::Record: {
      if (!check_session()) return out(454);
      if (from != State::Ready) return out(455);
      if (const auto* range = req.headers.find("Range")) {
        std::string_view r = *range;
        if (!(r.starts_with("npt=") && valid_npt(r.substr(4)))) {
          fire(probe::kRecordRangeInvalid);
          return out(457);
        }
        fire(probe::kRecordRangeOk);
      }
      move_to(State::Recording);
      attach_session();
      return out(200);
    }

    case Method::Teardown: {
      if (!check_session()) return out(454);
      fire(probe::kTeardownKeepsNothing);
      move_to(State::Init);
      return out(200);
    }

    case Method::GetParameter: {
      if (session_hdr && (!session_ || session_id != session_->session_id)) {
        fire(probe::kSessionMismatch);
        return out(454);
      }
      if (req.headers.contains("Content-Type")) fire(probe::kParamContentType);
      auto lines = body_lines(req.body);
      if (lines.empty()) {
        fire(probe::kGetParamKeepalive);
        attach_session();
        return out(200);
      }
      std::string reply;
      for (auto name : lines) {
        name = trim(name);
        if (!in(kKnownParams, name)) {
          fire(probe::kGetParamUnknown);
          return out(451);
        }
        reply.append(name).append(": 0\r\n");
      }
      fire(probe::kGetParamKnown);
      resp.headers.add("Content-Type", "text/parameters");
      resp.body = std::move(reply);
      attach_session();
      return out(200);
    }

    case Method::SetParameter: {
      if (session_hdr && (!session_ || session_id != session_->session_id)) {
        fire(probe::kSessionMismatch);
        return out(454);
      }
      if (req.headers.contains("Content-Type")) fire(probe::kParamContentType);
      auto lines = body_lines(req.body);
      if (lines.empty()) {
        fire(probe::kSetParamEmpty);
        return out(400);
      }
      for (auto line : lines) {
        auto colon = line.find(':');
        auto name = trim(line.substr(0, colon));
        if (in(kReadOnlyParams, name)) {
          fire(probe::kSetParamReadOnly);
          return out(458);
        }
        if (name != "scale" || colon == std::string_view::npos) {
          fire(probe::kSetParamUnknown);
          return out(451);
        }
        double s = 0;
        if (!parse_number(trim(line.substr(colon + 1)), s)) {
          fire(probe::kSetParamScaleBad);
          return out(451);
        }
        fire(probe::kSetParamScaleOk);
      }
      attach_session();
      return out(200);
    }
  }
  return out(400);
}

}  // namespace rtspfuzz::sim
