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

#include <cstdlib>
#include <fstream>

#include "rtspfuzz/crews/crews.hpp"
#include "rtspfuzz/error.hpp"

namespace rtspfuzz::crews {

json CrewRunRecord::to_json() const {
  json j = {{"crew", crew},
            {"query", query},
            {"context_ids", context_ids},
            {"prompts", prompts},
            {"raw_outputs", raw_outputs},
            {"wall_ms", wall.count()}};
  if (output) j["output"] = *output;
  if (failure) j["failure"] = *failure;
  return j;
}

AuditLog::AuditLog(std::filesystem::path path) : path_(std::move(path)) {}

void AuditLog::append(CrewRunRecord rec) {
  std::lock_guard lock(mu_);
  if (path_) {
    std::ofstream out(*path_, std::ios::app);
    if (!out) throw Error(Errc::IoError, "cannot append audit log " + path_->string());
    out << rec.to_json().dump() << '\n';
  }
  records_.push_back(std::move(rec));
}

std::vector<CrewRunRecord> AuditLog::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::string format_grammar(const json& mapping) {
  std::string out;
  std::size_t n = 0;
  for (const auto& [method, lines] : mapping.items()) {
    if (n) out += '\n';
    out += std::to_string(++n) + ". ";
    bool first = true;
    for (const auto& l : lines) {
      if (!first) out += '\n';
      first = false;
      out += rtsp::strip_line_terminator(l.is_string() ? l.get<std::string>() : l.dump());
      out += "\\r\\n";
    }
    if (first) out += method;  // method without lines; the parser rejects it
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> text_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    out.push_back(rtsp::strip_line_terminator(line));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::string_view ltrim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '`' || s.front() == '>')) s.remove_prefix(1);
  return s;
}

}  // namespace

rtsp::RtspRequest parse_packet(std::string_view text) {
  auto lines = text_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto start = ltrim(lines[i]);
    if (!rtsp::is_request_line(start)) continue;
    std::string msg(start);
    msg += "\r\n";
    std::size_t j = i + 1;
    for (; j < lines.size(); ++j) {
      std::string_view l = lines[j];
      if (l.empty() || l.starts_with("```") || l.starts_with("Explanation:")) break;
      msg += std::string(l) + "\r\n";
    }
    msg += "\r\n";
    auto head = rtsp::parse_request_lenient(msg).request;
    if (const auto* cl = head.headers.find("Content-Length"); cl && j < lines.size() && lines[j].empty()) {
      std::size_t want = std::strtoul(cl->c_str(), nullptr, 10);
      std::string body;
      for (std::size_t k = j + 1; k < lines.size() && body.size() < want; ++k) {
        if (lines[k].starts_with("```") || lines[k].starts_with("Explanation:")) break;
        body += lines[k] + "\r\n";
      }
      msg += body.substr(0, want);
    }
    return rtsp::parse_request(msg);
  }
  throw Error(Errc::MalformedRequest, "no RTSP request line in text");
}

std::string fsm_table_text() {
  std::string out = "States: INIT, READY, PLAYING, RECORDING. Start state: INIT.\n";
  for (auto s : rtsp::kAllStates)
    for (auto m : rtsp::kAllMethods)
      if (rtsp::fsm_allows(s, m))
        out += std::string(rtsp::state_name(s)) + " --" + std::string(rtsp::method_name(m)) + "--> " +
               std::string(rtsp::state_name(rtsp::fsm_next(s, m, rtsp::StatusClass::Success))) + "\n";
  return out;
}

}  // namespace rtspfuzz::crews
