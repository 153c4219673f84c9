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

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtspfuzz/error.hpp"

namespace rtspfuzz::llm {

using json = nlohmann::json;

struct ChatRequest {
  std::string system_prompt;
  std::string user_prompt;
  std::optional<json> schema;
  double temperature = 0.0;
  std::string model_id = "default";
  std::size_t max_output = 8192;  // characters
  std::chrono::milliseconds timeout{30000};
  // Names the pipeline step ("rfc.propositions", "crew.grammar.extract", ...). Scripts match on it.
  std::string task;
};

struct Usage {
  std::size_t request_chars = 0;
  std::size_t response_chars = 0;
};

struct ChatResponse {
  std::string text;
  std::optional<json> parsed;  // set iff a schema was supplied and the text validated
  Usage usage;
  std::chrono::milliseconds latency{0};
  int retries = 0;
};

// Stable 64-bit FNV-1a digest over the canonical request fields.
std::uint64_t request_hash(const ChatRequest& req);
std::string request_hash_hex(const ChatRequest& req);
json request_to_json(const ChatRequest& req);

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string name() const = 0;
  // Scripted and replay providers are deterministic and are never retried with backoff.
  virtual bool deterministic() const { return false; }
  // Returns the raw model text. Throws GatewayTimeout / GatewayUnavailable / ReplayMiss.
  virtual std::string complete(const ChatRequest& req) = 0;
};

// Canned responses selected by matching on the request. The first matching entry with
// remaining uses wins. Strict mode refuses unmatched requests instead of improvising.
class ScriptedResponder final : public Provider {
 public:
  struct Matcher {
    std::string task;                         // exact match when non-empty
    std::vector<std::string> system_contains;
    std::vector<std::string> user_contains;
  };
  struct Entry {
    Matcher match;
    std::string response;
    std::size_t times = 0;  // 0 = unlimited
  };

  explicit ScriptedResponder(std::vector<Entry> entries, bool strict = true);

  // {"strict": bool, "entries": [{"match": {"task", "system_contains", "user_contains"},
  //   "response": string | object, "times": n}]}. Object responses are serialized to JSON text.
  static std::shared_ptr<ScriptedResponder> from_json(const json& doc);
  static std::shared_ptr<ScriptedResponder> load(const std::filesystem::path& path);

  std::string name() const override { return "scripted"; }
  bool deterministic() const override { return true; }
  std::string complete(const ChatRequest& req) override;

  std::size_t calls() const;

 private:
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
  std::vector<std::size_t> used_;
  bool strict_;
  std::size_t calls_ = 0;
};

// Adapts a callable; handy for tests that need request-dependent answers.
class FunctionProvider final : public Provider {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;
  FunctionProvider(std::string name, Fn fn, bool deterministic = true)
      : name_(std::move(name)), fn_(std::move(fn)), deterministic_(deterministic) {}
  std::string name() const override { return name_; }
  bool deterministic() const override { return deterministic_; }
  std::string complete(const ChatRequest& req) override { return fn_(req); }

 private:
  std::string name_;
  Fn fn_;
  bool deterministic_;
};

struct HttpProviderConfig {
  std::string endpoint;                        // e.g. https://api.groq.com/openai
  std::string api_key_env = "RTSPFUZZ_LLM_API_KEY";
  std::map<std::string, std::string> profiles; // task prefix -> model id
  std::string default_model = "llama-3.3-70b-versatile";

  static HttpProviderConfig load(const std::filesystem::path& path);
};

// OpenAI-compatible chat completions endpoint. Calls are serialized per provider.
class HttpChatProvider final : public Provider {
 public:
  explicit HttpChatProvider(HttpProviderConfig cfg);
  std::string name() const override { return "http:" + cfg_.endpoint; }
  std::string complete(const ChatRequest& req) override;

 private:
  HttpProviderConfig cfg_;
  std::mutex mu_;
};

// Transcript: newline-delimited JSON, one {"hash", "request", "response"} record per call.
class RecordingProvider final : public Provider {
 public:
  RecordingProvider(std::shared_ptr<Provider> inner, std::filesystem::path transcript);
  std::string name() const override { return "record:" + inner_->name(); }
  bool deterministic() const override { return inner_->deterministic(); }
  std::string complete(const ChatRequest& req) override;

 private:
  std::shared_ptr<Provider> inner_;
  std::filesystem::path path_;
  std::mutex mu_;
};

// Serves recorded responses by request hash; repeated identical requests are served in
// recording order. Anything else is a ReplayMiss.
class ReplayProvider final : public Provider {
 public:
  explicit ReplayProvider(const std::filesystem::path& transcript);
  std::string name() const override { return "replay"; }
  bool deterministic() const override { return true; }
  std::string complete(const ChatRequest& req) override;

 private:
  std::mutex mu_;
  std::map<std::string, std::deque<std::string>> responses_;
};

struct GatewayOptions {
  int max_attempts = 3;  // total tries for schema-invalid output and live transport failures
  std::chrono::milliseconds backoff{500};
};

class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Provider> provider, GatewayOptions opts = {});

  ChatResponse complete(const ChatRequest& req);

  // Validates against the schema, retrying invalid output. Throws SchemaViolationError
  // carrying the last raw text when every attempt fails.
  ChatResponse complete_structured(ChatRequest req, const json& schema);

  const Provider& provider() const noexcept { return *provider_; }
  const GatewayOptions& options() const noexcept { return opts_; }

 private:
  std::string call_with_retry(const ChatRequest& req);

  std::shared_ptr<Provider> provider_;
  GatewayOptions opts_;
};

// Subset of JSON Schema: type, properties, required, items, minItems, enum,
// additionalProperties (schema or bool). Returns the first violation, if any.
std::optional<std::string> validate_schema(const json& value, const json& schema);

// Pulls a JSON value out of model text: the whole text, a fenced block, or the
// outermost {...} / [...] span.
std::optional<json> extract_json(std::string_view text);

}  // namespace rtspfuzz::llm
