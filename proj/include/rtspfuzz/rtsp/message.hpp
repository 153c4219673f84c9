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

#include <array>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rtspfuzz::rtsp {

enum class Method {
  Options,
  Describe,
  Announce,
  Setup,
  Play,
  Pause,
  Teardown,
  GetParameter,
  SetParameter,
  Record,
};

inline constexpr std::size_t kMethodCount = 10;

inline constexpr std::array<Method, kMethodCount> kAllMethods = {
    Method::Options,  Method::Describe, Method::Announce,     Method::Setup,        Method::Play,
    Method::Pause,    Method::Teardown, Method::GetParameter, Method::SetParameter, Method::Record,
};

std::string_view method_name(Method m) noexcept;
std::optional<Method> parse_method(std::string_view token) noexcept;

inline constexpr std::string_view kVersion = "RTSP/1.0";
inline constexpr std::string_view kCrlf = "\r\n";

using Header = std::pair<std::string, std::string>;

class HeaderList {
 public:
  HeaderList() = default;
  HeaderList(std::initializer_list<Header> init) : items_(init) {}

  // Case-insensitive lookup of the first header with this name.
  const std::string* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  // Replaces the first header with this name or appends a new one.
  void set(std::string_view name, std::string_view value);
  void add(std::string_view name, std::string_view value) { items_.emplace_back(name, value); }
  bool erase(std::string_view name);

  const std::vector<Header>& items() const noexcept { return items_; }
  std::vector<Header>& items() noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  friend bool operator==(const HeaderList&, const HeaderList&) = default;

 private:
  std::vector<Header> items_;
};

struct RtspRequest {
  // The raw method token. Unknown tokens are kept so malformed fuzz inputs stay representable.
  std::string method;
  std::string uri;
  std::string version{kVersion};
  HeaderList headers;
  std::string body;

  std::optional<Method> known_method() const { return parse_method(method); }
  std::optional<long long> cseq() const;

  friend bool operator==(const RtspRequest&, const RtspRequest&) = default;
};

RtspRequest make_request(Method m, std::string uri, HeaderList headers = {}, std::string body = {});

struct RtspResponse {
  int status = 200;
  std::string reason = "OK";
  std::string version{kVersion};
  HeaderList headers;
  std::string body;

  friend bool operator==(const RtspResponse&, const RtspResponse&) = default;
};

struct ParsedRequest {
  RtspRequest request;
  bool lf_normalized = false;      // at least one line ended in a bare LF
  bool known_method = true;
  bool truncated_body = false;     // fewer body bytes than Content-Length announced
  bool trailing_bytes = false;     // bytes after the message were ignored
};

// Strict parse: unknown methods throw UnknownMethod, trailing bytes throw MalformedRequest.
// Bare LF line endings are accepted and normalized.
RtspRequest parse_request(std::string_view bytes);

// Lenient parse used on fuzz inputs. Only a missing or broken request line / header
// syntax throws MalformedRequest; everything else is reported through flags.
ParsedRequest parse_request_lenient(std::string_view bytes);

// CRLF after the request line and every header, then a blank line, then the body.
// A non-empty body without a Content-Length header gets one appended.
std::string serialize(const RtspRequest& req);

RtspResponse parse_response(std::string_view bytes);
std::string serialize(const RtspResponse& resp);

std::string_view reason_phrase(int status) noexcept;

// True for "METHOD SP URI SP RTSP/x.y" (trailing CR tolerated).
bool is_request_line(std::string_view line) noexcept;
// True for "RTSP/x.y SP ddd ...".
bool is_status_line(std::string_view line) noexcept;

bool iequals(std::string_view a, std::string_view b) noexcept;

}  // namespace rtspfuzz::rtsp
