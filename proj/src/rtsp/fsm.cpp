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

#include "rtspfuzz/rtsp/fsm.hpp"

namespace rtspfuzz::rtsp {

StatusClass status_class(int status) noexcept {
  if (status < 200) return StatusClass::Informational;
  if (status < 300) return StatusClass::Success;
  if (status < 400) return StatusClass::Redirection;
  if (status < 500) return StatusClass::ClientError;
  return StatusClass::ServerError;
}

std::string_view state_name(State s) noexcept {
  switch (s) {
    case State::Init: return "INIT";
    case State::Ready: return "READY";
    case State::Playing: return "PLAYING";
    case State::Recording: return "RECORDING";
  }
  return "?";
}

namespace {

struct Row {
  bool allowed;
  State to;
};

Row lookup(State from, Method method) noexcept {
  switch (method) {
    case Method::Options:
    case Method::Describe:
    case Method::Announce:
    case Method::GetParameter:
    case Method::SetParameter:
      return {true, from};
    case Method::Setup:
      if (from == State::Init || from == State::Ready) return {true, State::Ready};
      break;
    case Method::Play:
      if (from == State::Ready) return {true, State::Playing};
      break;
    case Method::Record:
      if (from == State::Ready) return {true, State::Recording};
      break;
    case Method::Pause:
      if (from == State::Playing || from == State::Recording) return {true, State::Ready};
      break;
    case Method::Teardown:
      return {from != State::Init, State::Init};
  }
  return {false, from};
}

}  // namespace

State fsm_next(State from, Method method, StatusClass cls) noexcept {
  if (cls != StatusClass::Success) return from;
  return lookup(from, method).to;
}

bool fsm_allows(State from, Method method) noexcept { return lookup(from, method).allowed; }

}  // namespace rtspfuzz::rtsp
