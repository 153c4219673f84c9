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

#include <string_view>

#include "rtspfuzz/rtsp/message.hpp"

namespace rtspfuzz::rtsp {

enum class State { Init, Ready, Playing, Recording };

inline constexpr std::array<State, 4> kAllStates = {State::Init, State::Ready, State::Playing,
                                                    State::Recording};

enum class StatusClass { Informational = 1, Success, Redirection, ClientError, ServerError };

StatusClass status_class(int status) noexcept;
std::string_view state_name(State s) noexcept;

// Transition table (2xx only):
//   INIT    --SETUP-->    READY
//   READY   --SETUP-->    READY
//   READY   --PLAY-->     PLAYING
//   READY   --RECORD-->   RECORDING
//   PLAYING --PAUSE-->    READY
//   RECORDING --PAUSE-->  READY
//   any     --TEARDOWN--> INIT
//   OPTIONS, DESCRIBE, ANNOUNCE, GET_PARAMETER, SET_PARAMETER loop on every state.
// Anything else, and any non-2xx status, leaves the state unchanged.
State fsm_next(State from, Method method, StatusClass cls) noexcept;

// Whether the table lists (state, method) as a row a conforming server answers with 2xx.
// Combinations that only reach fsm_next's default self-loop are not allowed.
bool fsm_allows(State from, Method method) noexcept;

}  // namespace rtspfuzz::rtsp
