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

#include "rtspfuzz/rtsp/seed.hpp"

#include <cctype>
#include <charconv>

#include "rtspfuzz/error.hpp"

namespace rtspfuzz::rtsp {

namespace {

struct Line {
  std::size_t begin;
  std::size_t end;   // exclusive, CR/LF excluded
  std::size_t next;  // start of the following line
};

Line line_at(std::string_view s, std::size_t pos) {
  auto nl = s.find('\n', pos);
  std::size_t next = nl == std::string_view::npos ? s.size() : nl + 1;
  std::size_t end = nl == std::string_view::npos ? s.size() : nl;
  if (end > pos && s[end - 1] == '\r') --end;
  return {pos, end, next};
}

bool is_blank(std::string_view s, const Line& l) {
  for (auto i = l.begin; i < l.end; ++i)
    if (s[i] != ' ' && s[i] != '\t') return false;
  return true;
}

bool is_start(std::string_view s, const Line& l) {
  auto text = s.substr(l.begin, l.end - l.begin);
  return is_request_line(text) || is_status_line(text);
}

std::size_t content_length(std::string_view head) {
  std::size_t pos = 0;
  while (pos < head.size()) {
    auto l = line_at(head, pos);
    auto text = head.substr(l.begin, l.end - l.begin);
    auto colon = text.find(':');
    if (colon != std::string_view::npos && iequals(text.substr(0, colon), "Content-Length")) {
      auto v = text.substr(colon + 1);
      while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
      std::size_t n = 0;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
      if (ec == std::errc{}) return n;
      return 0;
    }
    pos = l.next;
  }
  return 0;
}

}  // namespace

std::vector<std::string> split_messages(std::string_view bytes) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    // skip blank lines between messages
    auto l = line_at(bytes, pos);
    if (is_blank(bytes, l)) {
      pos = l.next;
      continue;
    }

    if (!is_start(bytes, l)) {
      // garbage: runs until a start line that follows a blank line
      std::size_t begin = pos;
      bool prev_blank = false;
      while (pos < bytes.size()) {
        auto g = line_at(bytes, pos);
        if (prev_blank && is_start(bytes, g)) break;
        prev_blank = is_blank(bytes, g);
        pos = g.next;
      }
      auto seg = bytes.substr(begin, pos - begin);
      while (!seg.empty() && (seg.back() == '\n' || seg.back() == '\r')) seg.remove_suffix(1);
      out.emplace_back(seg);
      continue;
    }

    // header block up to and including the blank line
    std::size_t begin = pos;
    std::size_t head_end = bytes.size();
    while (pos < bytes.size()) {
      auto h = line_at(bytes, pos);
      pos = h.next;
      if (is_blank(bytes, h)) {
        head_end = pos;
        break;
      }
    }
    if (head_end == bytes.size()) head_end = pos;
    auto body = std::min(content_length(bytes.substr(begin, head_end - begin)), bytes.size() - head_end);
    pos = head_end + body;
    out.emplace_back(bytes.substr(begin, pos - begin));
  }
  return out;
}

SeedParseResult parse_seed(std::string_view bytes) {
  SeedParseResult result;
  auto segments = split_messages(bytes);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    auto first = seg.substr(0, seg.find('\n'));
    if (is_status_line(first)) {
      result.warnings.push_back("message " + std::to_string(i) + ": server response excluded");
      continue;
    }
    try {
      result.seed.requests.push_back(parse_request(seg));
    } catch (const Error& e) {
      result.warnings.push_back("message " + std::to_string(i) + ": dropped (" + e.what() + ")");
    }
  }
  if (result.seed.requests.empty()) throw Error(Errc::EmptySeed, "no parseable client request");
  return result;
}

std::string serialize_seed(const SeedSequence& seed) {
  std::string out;
  for (const auto& r : seed.requests) out += serialize(r);
  return out;
}

}  // namespace rtspfuzz::rtsp
