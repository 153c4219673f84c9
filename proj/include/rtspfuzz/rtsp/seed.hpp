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

#include <string>
#include <string_view>
#include <vector>

#include "rtspfuzz/rtsp/message.hpp"

namespace rtspfuzz::rtsp {

// One fuzz input in parsed form: client requests only.
struct SeedSequence {
  std::vector<RtspRequest> requests;

  friend bool operator==(const SeedSequence&, const SeedSequence&) = default;
};

struct SeedParseResult {
  SeedSequence seed;
  std::vector<std::string> warnings;
};

// Splits concatenated messages. A message ends after its header block plus
// Content-Length body bytes; the next one starts at a request or status line
// following a blank line. Bytes that fit neither are returned as their own segment.
std::vector<std::string> split_messages(std::string_view bytes);

// Splits and parses. Server responses and unparseable segments are dropped with a
// warning. Throws EmptySeed when nothing parses.
SeedParseResult parse_seed(std::string_view bytes);

std::string serialize_seed(const SeedSequence& seed);

}  // namespace rtspfuzz::rtsp
