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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtspfuzz/rtsp/fsm.hpp"
#include "rtspfuzz/rtsp/message.hpp"

namespace rtspfuzz::sim {

using ProbeId = std::uint32_t;

struct BranchProbe {
  ProbeId probe_id;
  std::string site;
};

// Every probe the server can fire, with a label naming its branch. Ids are stable.
const std::vector<BranchProbe>& probe_catalog();

struct SimSession {
  std::string session_id;  // 8 upper-case hex digits
  rtsp::State state = rtsp::State::Init;
  long long cseq_last = 0;
};

enum class Fault { None, Crash, Hang };

struct HandleResult {
  std::optional<rtsp::RtspResponse> response;  // empty when a fault fired
  std::vector<ProbeId> probes;
  Fault fault = Fault::None;
  std::string fault_signature;
};

struct SimConfig {
  // First session id issued after a reset; later ones count up from it.
  std::uint32_t session_seed = 0x000022B8;
  // Longer Session header values trip the seeded overflow bug.
  std::size_t session_value_limit = 64;
};

// In-process RTSP server for one client connection. Status vocabulary:
// 200, 400, 415, 451, 454, 455, 457, 458, 461. Seeded faults:
//   B1  Session header value longer than session_value_limit -> Crash
//   B2  negative CSeq after a successful PLAY                 -> Hang
class SimServer {
 public:
  explicit SimServer(SimConfig cfg = {});

  HandleResult handle(const rtsp::RtspRequest& req);
  // Parses leniently first; unparseable bytes get a 400.
  HandleResult handle_raw(std::string_view bytes);

  // Clears sessions and probe history and restarts the session id sequence.
  void reset();
  void reseed(std::uint32_t session_seed);

  rtsp::State state() const noexcept { return session_ ? session_->state : rtsp::State::Init; }
  const std::optional<SimSession>& session() const noexcept { return session_; }

  // Probes fired since the last reset, in firing order.
  const std::vector<ProbeId>& probe_history() const noexcept { return history_; }

 private:
  struct Ctx;

  HandleResult dispatch(const rtsp::RtspRequest& req, std::vector<ProbeId> probes);
  std::string next_session_id();

  SimConfig cfg_;
  std::optional<SimSession> session_;
  std::uint32_t issued_ = 0;
  bool played_ = false;
  std::vector<ProbeId> history_;
};

}  // namespace rtspfuzz::sim
