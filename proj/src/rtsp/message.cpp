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

#include "rtspfuzz/rtsp/message.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <span>

#include "rtspfuzz/error.hpp"

namespace rtspfuzz::rtsp {

namespace {

constexpr std::array<std::string_view, kMethodCount> kMethodNames = {
    "OPTIONS", "DESCRIBE", "ANNOUNCE", "SETUP", "PLAY",
    "PAUSE",   "TEARDOWN", "GET_PARAMETER", "SET_PARAMETER", "RECORD",
};

bool is_version_token(std::string_view v) noexcept {
  // RTSP/d.d with one or more digits on both sides
  if (v.size() < 8 || v.substr(0, 5) != "RTSP/") return false;
  auto rest = v.substr(5);
  auto dot = rest.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == rest.size()) return false;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (i == dot) continue;
    if (!std::isdigit(static_cast<unsigned char>(rest[i]))) return false;
  }
  return true;
}

std::string_view strip_cr(std::string_view line) noexcept {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

struct HeadBlock {
  std::vector<std::string_view> lines;  // CR stripped
  std::size_t body_offset = 0;          // first byte after the blank line (or end)
  bool lf_only = false;
  bool terminated = false;              // blank line seen
};

HeadBlock split_head(std::string_view bytes) {
  HeadBlock head;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    auto nl = bytes.find('\n', pos);
    std::string_view raw = nl == std::string_view::npos ? bytes.substr(pos) : bytes.substr(pos, nl - pos);
    if (nl != std::string_view::npos && (raw.empty() || raw.back() != '\r')) head.lf_only = true;
    std::string_view line = strip_cr(raw);
    pos = nl == std::string_view::npos ? bytes.size() : nl + 1;
    if (line.empty()) {
      if (head.lines.empty()) continue;  // leading blank lines
      head.terminated = true;
      break;
    }
    head.lines.push_back(line);
  }
  head.body_offset = pos;
  return head;
}

std::string_view trim_ows(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<long long> parse_int(std::string_view s) noexcept {
  s = trim_ows(s);
  if (s.empty()) return std::nullopt;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

void parse_headers(std::span<const std::string_view> lines, HeaderList& out) {
  for (auto line : lines) {
    auto colon = line.find(':');
    if (colon == std::string_view::npos || colon == 0)
      throw Error(Errc::MalformedRequest, "header line without name: '" + std::string(line) + "'");
    auto name = line.substr(0, colon);
    if (name.find_first_of(" \t") != std::string_view::npos)
      throw Error(Errc::MalformedRequest, "whitespace in header name: '" + std::string(name) + "'");
    auto value = line.substr(colon + 1);
    while (!value.empty() && (value.front() == ' ' || value.front() == '\t')) value.remove_prefix(1);
    out.add(name, value);
  }
}

}  // namespace

std::string_view method_name(Method m) noexcept { return kMethodNames[static_cast<std::size_t>(m)]; }

std::optional<Method> parse_method(std::string_view token) noexcept {
  for (std::size_t i = 0; i < kMethodNames.size(); ++i)
    if (kMethodNames[i] == token) return static_cast<Method>(i);
  return std::nullopt;
}

bool iequals(std::string_view a, std::string_view b) noexcept {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

const std::string* HeaderList::find(std::string_view name) const {
  for (const auto& [k, v] : items_)
    if (iequals(k, name)) return &v;
  return nullptr;
}

void HeaderList::set(std::string_view name, std::string_view value) {
  for (auto& [k, v] : items_) {
    if (iequals(k, name)) {
      v = value;
      return;
    }
  }
  add(name, value);
}

bool HeaderList::erase(std::string_view name) {
  auto it = std::find_if(items_.begin(), items_.end(), [&](const Header& h) { return iequals(h.first, name); });
  if (it == items_.end()) return false;
  items_.erase(it);
  return true;
}

std::optional<long long> RtspRequest::cseq() const {
  const auto* v = headers.find("CSeq");
  if (!v) return std::nullopt;
  return parse_int(*v);
}

RtspRequest make_request(Method m, std::string uri, HeaderList headers, std::string body) {
  RtspRequest req;
  req.method = std::string(method_name(m));
  req.uri = std::move(uri);
  req.headers = std::move(headers);
  req.body = std::move(body);
  return req;
}

bool is_request_line(std::string_view line) noexcept {
  line = strip_cr(line);
  auto sp1 = line.find(' ');
  if (sp1 == std::string_view::npos || sp1 == 0) return false;
  for (char c : line.substr(0, sp1))
    if (!(std::isupper(static_cast<unsigned char>(c)) || c == '_')) return false;
  auto sp2 = line.find(' ', sp1 + 1);
  if (sp2 == std::string_view::npos || sp2 == sp1 + 1) return false;
  return is_version_token(line.substr(sp2 + 1));
}

bool is_status_line(std::string_view line) noexcept {
  line = strip_cr(line);
  auto sp = line.find(' ');
  if (sp == std::string_view::npos || !is_version_token(line.substr(0, sp))) return false;
  auto code = line.substr(sp + 1, 3);
  return code.size() == 3 && std::all_of(code.begin(), code.end(), [](char c) {
           return std::isdigit(static_cast<unsigned char>(c));
         });
}

ParsedRequest parse_request_lenient(std::string_view bytes) {
  ParsedRequest out;
  auto head = split_head(bytes);
  if (head.lines.empty()) throw Error(Errc::MalformedRequest, "missing request line");
  out.lf_normalized = head.lf_only;

  auto line = head.lines.front();
  auto sp1 = line.find(' ');
  auto sp2 = sp1 == std::string_view::npos ? sp1 : line.find(' ', sp1 + 1);
  if (sp1 == std::string_view::npos || sp2 == std::string_view::npos || sp1 == 0 || sp2 == sp1 + 1 ||
      line.find(' ', sp2 + 1) != std::string_view::npos)
    throw Error(Errc::MalformedRequest, "bad request line: '" + std::string(line) + "'");
  auto& req = out.request;
  req.method = std::string(line.substr(0, sp1));
  req.uri = std::string(line.substr(sp1 + 1, sp2 - sp1 - 1));
  req.version = std::string(line.substr(sp2 + 1));
  if (!is_version_token(req.version))
    throw Error(Errc::MalformedRequest, "bad protocol version: '" + req.version + "'");
  out.known_method = parse_method(req.method).has_value();

  parse_headers(std::span(head.lines).subspan(1), req.headers);

  auto rest = bytes.substr(std::min(head.body_offset, bytes.size()));
  std::size_t body_len = 0;
  if (const auto* cl = req.headers.find("Content-Length")) {
    auto n = parse_int(*cl);
    if (!n || *n < 0) throw Error(Errc::MalformedRequest, "bad Content-Length: '" + *cl + "'");
    body_len = static_cast<std::size_t>(*n);
    if (body_len > rest.size()) {
      out.truncated_body = true;
      body_len = rest.size();
    }
  }
  req.body = std::string(rest.substr(0, body_len));
  out.trailing_bytes = rest.size() > body_len;
  return out;
}

RtspRequest parse_request(std::string_view bytes) {
  auto parsed = parse_request_lenient(bytes);
  if (!parsed.known_method)
    throw Error(Errc::UnknownMethod, "unknown method '" + parsed.request.method + "'");
  if (parsed.truncated_body) throw Error(Errc::MalformedRequest, "body shorter than Content-Length");
  if (parsed.trailing_bytes) throw Error(Errc::MalformedRequest, "unexpected bytes after message");
  return std::move(parsed.request);
}

std::string serialize(const RtspRequest& req) {
  std::string out;
  out.reserve(64 + req.body.size());
  out.append(req.method).append(" ").append(req.uri).append(" ").append(req.version).append(kCrlf);
  for (const auto& [k, v] : req.headers.items()) out.append(k).append(": ").append(v).append(kCrlf);
  if (!req.body.empty() && !req.headers.contains("Content-Length"))
    out.append("Content-Length: ").append(std::to_string(req.body.size())).append(kCrlf);
  out.append(kCrlf);
  out.append(req.body);
  return out;
}

RtspResponse parse_response(std::string_view bytes) {
  auto head = split_head(bytes);
  if (head.lines.empty() || !is_status_line(head.lines.front()))
    throw Error(Errc::MalformedRequest, "missing status line");
  RtspResponse resp;
  auto line = head.lines.front();
  auto sp = line.find(' ');
  resp.version = std::string(line.substr(0, sp));
  resp.status = std::stoi(std::string(line.substr(sp + 1, 3)));
  resp.reason = sp + 5 <= line.size() ? std::string(line.substr(sp + 5)) : std::string();
  parse_headers(std::span(head.lines).subspan(1), resp.headers);
  auto rest = bytes.substr(std::min(head.body_offset, bytes.size()));
  if (const auto* cl = resp.headers.find("Content-Length")) {
    auto n = parse_int(*cl).value_or(0);
    resp.body = std::string(rest.substr(0, std::min<std::size_t>(static_cast<std::size_t>(std::max(0LL, n)), rest.size())));
  }
  return resp;
}

std::string serialize(const RtspResponse& resp) {
  std::string out;
  out.append(resp.version).append(" ").append(std::to_string(resp.status)).append(" ").append(resp.reason).append(kCrlf);
  for (const auto& [k, v] : resp.headers.items()) out.append(k).append(": ").append(v).append(kCrlf);
  if (!resp.body.empty() && !resp.headers.contains("Content-Length"))
    out.append("Content-Length: ").append(std::to_string(resp.body.size())).append(kCrlf);
  out.append(kCrlf).append(resp.body);
  return out;
}

std::string_view reason_phrase(int status) noexcept {
  switch (status) {
    case 200: return "OK";
    case 400: return "Bad Request";
    case 415: return "Unsupported Media Type";
    case 451: return "Parameter Not Understood";
    case 454: return "Session Not Found";
    case 455: return "Method Not Valid in This State";
    case 457: return "Invalid Range";
    case 458: return "Parameter Is Read-Only";
    case 461: return "Unsupported Transport";
    default: return "Unknown";
  }
}

}  // namespace rtspfuzz::rtsp
