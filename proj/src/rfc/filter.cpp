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

#include <cctype>

#include "rtspfuzz/error.hpp"
#include "rtspfuzz/prompts.hpp"
#include "rtspfuzz/rfc/pipeline.hpp"

namespace rtspfuzz::rfc {

namespace {

bool all_space(std::string_view s) {
  for (unsigned char c : s)
    if (!std::isspace(c)) return false;
  return true;
}

std::regex icase(const char* pattern) { return std::regex(pattern, std::regex::ECMAScript | std::regex::icase); }

}  // namespace

FilterRules FilterRules::defaults() {
  FilterRules r;
  r.deny = {
      icase(R"(copyright)"),
      icase(R"(all rights reserved)"),
      icase(R"(\[page [0-9]+\])"),
      icase(R"(^\s*rfc [0-9]+\s)"),
      icase(R"(table of contents)"),
      icase(R"(acknowledg)"),
      icase(R"(authors?'? address)"),
      icase(R"(intellectual property)"),
      icase(R"(status of this memo)"),
      icase(R"(this document and translations of it)"),
      icase(R"(internet society)"),
      icase(R"(network working group)"),
      icase(R"(request for comments:)"),
      icase(R"(\.{6,}\s*[0-9]+)"),
  };
  r.allow = {
      std::regex(R"(\b(OPTIONS|DESCRIBE|ANNOUNCE|SETUP|PLAY|PAUSE|TEARDOWN|GET_PARAMETER|SET_PARAMETER|RECORD|REDIRECT)\b)"),
      std::regex(
          R"(\b(CSeq|Session|Transport|Range|Content-Type|Content-Length|Content-Base|Accept|Public|Scale|Speed|RTP-Info|Require|Unsupported)\b)"),
      std::regex(R"(\b[1-5][0-9][0-9] [A-Z][a-z])"),
      icase(R"(\b(state machine|states?|sessions?|requests?|responses?|header fields?|methods?|status codes?|clients?|servers?)\b)"),
  };
  return r;
}

bool filter_paragraph(const Paragraph& p, const FilterRules& rules) {
  if (all_space(p.text)) return false;
  if (p.verbatim()) return true;
  for (const auto& d : rules.deny)
    if (std::regex_search(p.text, d)) return false;
  for (const auto& a : rules.allow)
    if (std::regex_search(p.text, a)) return true;
  return false;
}

bool filter_paragraph_model(const Paragraph& p, llm::Gateway& gw, const FilterRules& fallback, Warnings& warnings) {
  if (all_space(p.text)) return false;
  if (p.verbatim()) return true;
  static const llm::json schema = {{"type", "object"},
                                   {"required", {"relevant"}},
                                   {"properties", {{"relevant", {{"type", "boolean"}}}}}};
  llm::ChatRequest req;
  req.task = "rfc.filter";
  req.system_prompt = std::string(prompt_asset("filter"));
  req.user_prompt = p.text;
  try {
    return gw.complete_structured(req, schema).parsed->at("relevant").get<bool>();
  } catch (const Error& e) {
    warnings.push_back("FilterFallback: paragraph " + std::to_string(p.index) + ": " + e.what());
    return filter_paragraph(p, fallback);
  }
}

std::string render_paragraph(const Paragraph& p) {
  if (!p.verbatim()) return p.text;
  return std::string(kVerbatimMark) + "\n" + p.text + "\n" + std::string(kVerbatimMark);
}

std::vector<Section> assemble_sections(const std::vector<Paragraph>& kept, std::size_t budget, Warnings& warnings) {
  std::vector<Section> out;
  const std::string head = std::string(kSectionMark) + "\n";
  const std::string sep = "\n" + std::string(kParagraphMark) + "\n";
  Section cur;
  auto flush = [&] {
    if (cur.paragraphs.empty()) return;
    cur.id = out.size() + 1;
    out.push_back(std::move(cur));
    cur = Section{};
  };
  for (const auto& p : kept) {
    auto piece = render_paragraph(p);
    auto grown = cur.paragraphs.empty() ? head + piece : cur.rendered_text + sep + piece;
    if (grown.size() <= budget) {
      cur.paragraphs.push_back(p);
      cur.rendered_text = std::move(grown);
      continue;
    }
    flush();
    cur.paragraphs.push_back(p);
    cur.rendered_text = head + piece;
    if (cur.rendered_text.size() > budget) {
      warnings.push_back("OversizeSection: paragraph " + std::to_string(p.index) + " renders to " +
                         std::to_string(cur.rendered_text.size()) + " characters");
      flush();
    }
  }
  flush();
  return out;
}

}  // namespace rtspfuzz::rfc
