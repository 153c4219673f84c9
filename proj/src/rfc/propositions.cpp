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

#include "rtspfuzz/error.hpp"
#include "rtspfuzz/prompts.hpp"
#include "rtspfuzz/rfc/pipeline.hpp"

namespace rtspfuzz::rfc {

const llm::json& propositions_schema() {
  static const llm::json schema = {
      {"type", "object"},
      {"required", {"sentences"}},
      {"properties", {{"sentences", {{"type", "array"}, {"items", {{"type", "string"}}}}}}},
  };
  return schema;
}

llm::ChatRequest proposition_request(const Section& s) {
  llm::ChatRequest req;
  req.task = "rfc.propositions";
  req.system_prompt = std::string(prompt_asset("propositions"));
  req.user_prompt = s.rendered_text;
  return req;
}

std::vector<Proposition> propositionalize(const Section& s, llm::Gateway& gw, Warnings& warnings) {
  llm::json parsed;
  try {
    parsed = *gw.complete_structured(proposition_request(s), propositions_schema()).parsed;
  } catch (const SchemaViolationError& e) {
    throw Error(Errc::PropositionParseFailure,
                "section " + std::to_string(s.id) + ": " + e.what() + "; last output: " + e.last_raw().substr(0, 200));
  }

  std::vector<Proposition> out;
  std::string joined;
  auto add = [&](std::string text) {
    out.push_back({"s" + std::to_string(s.id) + "-p" + std::to_string(out.size() + 1), text, s.id});
    joined += text;
    joined += '\n';
  };
  for (const auto& v : parsed["sentences"]) {
    auto text = v.get<std::string>();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
      warnings.push_back("EmptyProposition: section " + std::to_string(s.id));
      continue;
    }
    add(std::move(text));
  }
  for (const auto& p : s.paragraphs) {
    if (!p.verbatim() || joined.find(p.text) != std::string::npos) continue;
    warnings.push_back("VerbatimRestored: section " + std::to_string(s.id) + " paragraph " + std::to_string(p.index));
    add(p.text);
  }
  return out;
}

}  // namespace rtspfuzz::rfc
