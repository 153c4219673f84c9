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

#include <stdexcept>
#include <string>
#include <string_view>

namespace rtspfuzz {

// Every failure the library reports maps to one of these codes.
enum class Errc {
  // rfc pipeline
  EmptyDocument,
  PropositionParseFailure,
  // knowledge store
  EmbeddingUnavailable,
  DuplicateChunk,
  EmptyIndex,
  EmbedderMismatch,
  IndexCorrupt,
  // llm gateway
  GatewayTimeout,
  GatewayUnavailable,
  SchemaViolation,
  ReplayMiss,
  // rtsp model
  MalformedRequest,
  UnknownMethod,
  TemplateFormatError,
  BindingArity,
  EmptySeed,
  // crews
  GrammarCrewEmpty,
  EnrichmentInfeasible,
  EnrichmentRejected,
  PlateauGenerationFailed,
  // cve
  CveUnavailable,
  // fuzz engine
  CampaignAborted,
  // generic
  InvalidArgument,
  IoError,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// SchemaViolation keeps the last raw model text so callers can log it.
class SchemaViolationError : public Error {
 public:
  SchemaViolationError(const std::string& what, std::string last_raw)
      : Error(Errc::SchemaViolation, what), last_raw_(std::move(last_raw)) {}

  const std::string& last_raw() const noexcept { return last_raw_; }

 private:
  std::string last_raw_;
};

}  // namespace rtspfuzz
