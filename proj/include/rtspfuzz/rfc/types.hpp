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

#include <cstddef>
#include <string>
#include <vector>

namespace rtspfuzz::rfc {

enum class ParagraphKind { Prose, PacketExample, CodeBlock };

struct Paragraph {
  std::size_t index = 0;
  std::string text;
  ParagraphKind kind = ParagraphKind::Prose;
  std::size_t offset = 0;  // byte offset of the first line in the source

  bool verbatim() const noexcept { return kind != ParagraphKind::Prose; }
};

struct Section {
  std::size_t id = 0;
  std::vector<Paragraph> paragraphs;
  std::string rendered_text;
};

struct Proposition {
  std::string id;
  std::string text;
  std::size_t source_section = 0;
};

struct Chunk {
  std::string chunk_id;
  std::string title;
  std::string summary;
  std::vector<Proposition> propositions;
};

struct ChunkerConfig {
  double theta = 0.5;
  std::size_t max_chunks = 64;
  std::size_t refine_every = 5;
};

}  // namespace rtspfuzz::rfc
