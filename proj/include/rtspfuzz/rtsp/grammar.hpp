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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtspfuzz/rtsp/message.hpp"

namespace rtspfuzz::rtsp {

inline constexpr std::string_view kPlaceholder = "<<VALUE>>";

// A request skeleton. lines[0] is the request line, the rest are header lines.
// Lines are stored without terminators; each one is emitted with CRLF.
struct GrammarTemplate {
  Method method = Method::Options;
  std::vector<std::string> lines;

  std::size_t placeholder_count() const;
  friend bool operator==(const GrammarTemplate&, const GrammarTemplate&) = default;
};

// Checks the template invariants and throws TemplateFormatError on violation.
void validate_template(const GrammarTemplate& t);

// Builds a template from raw lines (terminators, literal "\r\n" escapes included, are stripped).
GrammarTemplate make_template(std::span<const std::string> raw_lines);

// Numbered text format:
//
//   1. DESCRIBE <<VALUE>> RTSP/1.0\r\n
//   CSeq: <<VALUE>>\r\n
//   Accept: <<VALUE>>\r\n
//
//   2. SETUP <<VALUE>> RTSP/1.0\r\n
//   ...
//
// Block numbers must be strictly increasing positive integers; their values carry no meaning.
// The "\r\n" suffix is the literal four-character escape and is optional on input.
std::vector<GrammarTemplate> parse_template_text(std::string_view numbered_text);
std::string render_template_text(std::span<const GrammarTemplate> templates);

// Substitutes placeholders in order, line by line. Throws BindingArity when the
// number of bindings differs from the placeholder count.
RtspRequest instantiate_template(const GrammarTemplate& t, std::span<const std::string> bindings);

std::string strip_line_terminator(std::string_view line);

}  // namespace rtspfuzz::rtsp
