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

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>

#include "rtspfuzz/error.hpp"
#include "rtspfuzz/rfc/pipeline.hpp"
#include "rtspfuzz/rtsp/message.hpp"

namespace rtspfuzz::rfc {

namespace {

struct RawLine {
  std::size_t begin;
  std::string_view text;  // without the newline
};

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; });
}

std::size_t indent_of(std::string_view s) {
  std::size_t col = 0;
  for (char c : s) {
    if (c == ' ')
      ++col;
    else if (c == '\t')
      col = (col / 8 + 1) * 8;
    else
      break;
  }
  return col;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// drops trace prefixes such as "C->S:" or "S->C:"
std::string_view strip_direction(std::string_view s) {
  auto arrow = s.find("->");
  auto colon = s.find(':');
  if (arrow != std::string_view::npos && colon != std::string_view::npos && arrow < colon && colon < 12)
    return trim(s.substr(colon + 1));
  return s;
}

bool header_like(std::string_view s) {
  auto colon = s.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  for (char c : s.substr(0, colon))
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
  return true;
}

ParagraphKind classify(const std::vector<RawLine>& lines) {
  std::size_t headers = 0;
  for (const auto& l : lines) {
    auto t = strip_direction(trim(l.text));
    if (rtsp::is_request_line(t) || rtsp::is_status_line(t)) return ParagraphKind::PacketExample;
    if (header_like(t)) ++headers;
  }
  return headers * 2 >= lines.size() && headers > 0 ? ParagraphKind::PacketExample : ParagraphKind::CodeBlock;
}

}  // namespace

std::vector<Paragraph> segment(std::string_view raw) {
  if (trim(raw).empty()) throw Error(Errc::EmptyDocument, "document has no text");

  std::vector<std::vector<RawLine>> blocks;
  std::vector<RawLine> current;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    auto nl = raw.find('\n', pos);
    auto end = nl == std::string_view::npos ? raw.size() : nl;
    RawLine line{pos, raw.substr(pos, end - pos)};
    if (blank(line.text)) {
      if (!current.empty()) blocks.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(line);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (!current.empty()) blocks.push_back(std::move(current));

  // modal paragraph indent, ties to the shallower one
  std::map<std::size_t, std::size_t> freq;
  std::vector<std::size_t> min_indent;
  for (const auto& b : blocks) {
    std::size_t m = SIZE_MAX;
    for (const auto& l : b) m = std::min(m, indent_of(l.text));
    min_indent.push_back(m);
    ++freq[m];
  }
  std::size_t modal = 0, best = 0;
  for (const auto& [ind, n] : freq)
    if (n > best) {
      best = n;
      modal = ind;
    }

  std::vector<Paragraph> out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    auto first = b.front().begin;
    auto last = b.back().begin + b.back().text.size();
    auto text = raw.substr(first, last - first);
    while (!text.empty() && (text.back() == '\r' || text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    Paragraph p;
    p.index = out.size();
    p.text = std::string(text);
    p.offset = first;
    p.kind = min_indent[i] >= modal + 2 ? classify(b) : ParagraphKind::Prose;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace rtspfuzz::rfc
