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

#include "rtspfuzz/rtsp/grammar.hpp"

#include <cctype>

#include "rtspfuzz/error.hpp"

namespace rtspfuzz::rtsp {

namespace {

constexpr std::string_view kEscapedCrlf = "\\r\\n";

std::size_t count_placeholders(std::string_view line) {
  std::size_t n = 0;
  for (auto pos = line.find(kPlaceholder); pos != std::string_view::npos;
       pos = line.find(kPlaceholder, pos + kPlaceholder.size()))
    ++n;
  return n;
}

[[noreturn]] void format_error(const std::string& msg) { throw Error(Errc::TemplateFormatError, msg); }

// Every "<<" and ">>" must belong to an exact <<VALUE>> token.
void check_placeholders(std::string_view line) {
  std::string rest(line);
  for (auto pos = rest.find(kPlaceholder); pos != std::string::npos; pos = rest.find(kPlaceholder))
    rest.replace(pos, kPlaceholder.size(), "\x01");
  if (rest.find("<<") != std::string::npos || rest.find(">>") != std::string::npos)
    format_error("malformed placeholder in '" + std::string(line) + "'");
}

}  // namespace

std::string strip_line_terminator(std::string_view line) {
  if (line.ends_with(kEscapedCrlf)) line.remove_suffix(kEscapedCrlf.size());
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  return std::string(line);
}

std::size_t GrammarTemplate::placeholder_count() const {
  std::size_t n = 0;
  for (const auto& l : lines) n += count_placeholders(l);
  return n;
}

void validate_template(const GrammarTemplate& t) {
  if (t.lines.empty()) format_error("template has no lines");
  const auto& first = t.lines.front();
  // The request line may carry a placeholder URI, so check shape on a bound copy.
  std::string bound = first;
  for (auto pos = bound.find(kPlaceholder); pos != std::string::npos; pos = bound.find(kPlaceholder))
    bound.replace(pos, kPlaceholder.size(), "x");
  if (!is_request_line(bound)) format_error("first line is not a request line: '" + first + "'");
  auto method = parse_method(std::string_view(first).substr(0, first.find(' ')));
  if (!method) format_error("unknown method in '" + first + "'");
  if (*method != t.method) format_error("request line method differs from template method");
  for (const auto& line : t.lines) check_placeholders(line);
  for (std::size_t i = 1; i < t.lines.size(); ++i) {
    const auto& line = t.lines[i];
    auto colon = line.find(':');
    if (colon == std::string::npos || colon == 0 || line.find_first_of(" \t") < colon)
      format_error("not a header line: '" + line + "'");
  }
}

GrammarTemplate make_template(std::span<const std::string> raw_lines) {
  GrammarTemplate t;
  for (const auto& raw : raw_lines) {
    auto line = strip_line_terminator(raw);
    if (!line.empty()) t.lines.push_back(std::move(line));
  }
  if (t.lines.empty()) format_error("template has no lines");
  auto method = parse_method(std::string_view(t.lines.front()).substr(0, t.lines.front().find(' ')));
  if (!method) format_error("unknown method in '" + t.lines.front() + "'");
  t.method = *method;
  validate_template(t);
  return t;
}

std::vector<GrammarTemplate> parse_template_text(std::string_view text) {
  std::vector<std::vector<std::string>> blocks;
  long long last_number = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    auto line = strip_line_terminator(raw);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::size_t digits = 0;
    while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
    if (digits > 0 && digits < line.size() && line[digits] == '.') {
      long long number = std::stoll(line.substr(0, digits));
      if (number <= last_number)
        format_error("block number " + std::to_string(number) + " does not increase");
      last_number = number;
      auto body = line.substr(digits + 1);
      body.erase(0, body.find_first_not_of(" \t"));
      blocks.push_back({body});
      continue;
    }
    if (blocks.empty()) format_error("text before first numbered block: '" + line + "'");
    blocks.back().push_back(line);
  }

  std::vector<GrammarTemplate> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(make_template(b));
  return out;
}

std::string render_template_text(std::span<const GrammarTemplate> templates) {
  std::string out;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    if (i) out += '\n';
    const auto& t = templates[i];
    for (std::size_t j = 0; j < t.lines.size(); ++j) {
      if (j == 0) out += std::to_string(i + 1) + ". ";
      out += t.lines[j];
      out += kEscapedCrlf;
      out += '\n';
    }
  }
  return out;
}

RtspRequest instantiate_template(const GrammarTemplate& t, std::span<const std::string> bindings) {
  auto expected = t.placeholder_count();
  if (bindings.size() != expected)
    throw Error(Errc::BindingArity, "template needs " + std::to_string(expected) + " values, got " +
                                        std::to_string(bindings.size()));
  std::size_t next = 0;
  std::string wire;
  for (const auto& line : t.lines) {
    std::string bound = line;
    for (auto pos = bound.find(kPlaceholder); pos != std::string::npos;
         pos = bound.find(kPlaceholder, pos)) {
      const auto& value = bindings[next++];
      bound.replace(pos, kPlaceholder.size(), value);
      pos += value.size();
    }
    wire += bound;
    wire += kCrlf;
  }
  wire += kCrlf;
  return parse_request(wire);
}

}  // namespace rtspfuzz::rtsp
