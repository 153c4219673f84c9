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

namespace rtspfuzz {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyDocument: return "EmptyDocument";
    case Errc::PropositionParseFailure: return "PropositionParseFailure";
    case Errc::EmbeddingUnavailable: return "EmbeddingUnavailable";
    case Errc::DuplicateChunk: return "DuplicateChunk";
    case Errc::EmptyIndex: return "EmptyIndex";
    case Errc::EmbedderMismatch: return "EmbedderMismatch";
    case Errc::IndexCorrupt: return "IndexCorrupt";
    case Errc::GatewayTimeout: return "GatewayTimeout";
    case Errc::GatewayUnavailable: return "GatewayUnavailable";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::ReplayMiss: return "ReplayMiss";
    case Errc::MalformedRequest: return "MalformedRequest";
    case Errc::UnknownMethod: return "UnknownMethod";
    case Errc::TemplateFormatError: return "TemplateFormatError";
    case Errc::BindingArity: return "BindingArity";
    case Errc::EmptySeed: return "EmptySeed";
    case Errc::GrammarCrewEmpty: return "GrammarCrewEmpty";
    case Errc::EnrichmentInfeasible: return "EnrichmentInfeasible";
    case Errc::EnrichmentRejected: return "EnrichmentRejected";
    case Errc::PlateauGenerationFailed: return "PlateauGenerationFailed";
    case Errc::CveUnavailable: return "CveUnavailable";
    case Errc::CampaignAborted: return "CampaignAborted";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace rtspfuzz
