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

#include "rtspfuzz/llm/gateway.hpp"

#include <cstdio>
#include <fstream>
#include <thread>

namespace rtspfuzz::llm {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

bool contains_all(const std::string& hay, const std::vector<std::string>& needles) {
  for (const auto& n : needles)
    if (hay.find(n) == std::string::npos) return false;
  return true;
}

}  // namespace

json request_to_json(const ChatRequest& req) {
  json j = {
      {"task", req.task},
      {"model_id", req.model_id},
      {"system", req.system_prompt},
      {"user", req.user_prompt},
      {"temperature", req.temperature},
      {"max_output", req.max_output},
  };
  if (req.schema) j["schema"] = *req.schema;
  return j;
}

std::uint64_t request_hash(const ChatRequest& req) { return fnv1a(request_to_json(req).dump()); }

std::string request_hash_hex(const ChatRequest& req) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(request_hash(req)));
  return buf;
}

// ---- ScriptedResponder ------------------------------------------------------

ScriptedResponder::ScriptedResponder(std::vector<Entry> entries, bool strict)
    : entries_(std::move(entries)), used_(entries_.size(), 0), strict_(strict) {}

std::shared_ptr<ScriptedResponder> ScriptedResponder::from_json(const json& doc) {
  std::vector<Entry> entries;
  for (const auto& e : doc.at("entries")) {
    Entry entry;
    if (e.contains("match")) {
      const auto& m = e["match"];
      entry.match.task = m.value("task", std::string{});
      entry.match.system_contains = m.value("system_contains", std::vector<std::string>{});
      entry.match.user_contains = m.value("user_contains", std::vector<std::string>{});
    }
    const auto& r = e.at("response");
    entry.response = r.is_string() ? r.get<std::string>() : r.dump();
    entry.times = e.value("times", std::size_t{0});
    entries.push_back(std::move(entry));
  }
  return std::make_shared<ScriptedResponder>(std::move(entries), doc.value("strict", true));
}

std::shared_ptr<ScriptedResponder> ScriptedResponder::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open script " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, "bad script " + path.string() + ": " + e.what());
  }
}

std::string ScriptedResponder::complete(const ChatRequest& req) {
  std::lock_guard lock(mu_);
  ++calls_;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.times != 0 && used_[i] >= e.times) continue;
    if (!e.match.task.empty() && e.match.task != req.task) continue;
    if (!contains_all(req.system_prompt, e.match.system_contains)) continue;
    if (!contains_all(req.user_prompt, e.match.user_contains)) continue;
    ++used_[i];
    return e.response;
  }
  if (strict_) {
    auto preview = req.user_prompt.substr(0, 160);
    throw Error(Errc::GatewayUnavailable,
                "scripted responder has no entry for task '" + req.task + "' (user prompt starts: '" + preview + "')");
  }
  return {};
}

std::size_t ScriptedResponder::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

// ---- record / replay --------------------------------------------------------

RecordingProvider::RecordingProvider(std::shared_ptr<Provider> inner, std::filesystem::path transcript)
    : inner_(std::move(inner)), path_(std::move(transcript)) {}

std::string RecordingProvider::complete(const ChatRequest& req) {
  auto text = inner_->complete(req);
  std::lock_guard lock(mu_);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error(Errc::IoError, "cannot append transcript " + path_.string());
  json rec = {{"hash", request_hash_hex(req)}, {"request", request_to_json(req)}, {"response", text}};
  out << rec.dump() << '\n';
  return text;
}

ReplayProvider::ReplayProvider(const std::filesystem::path& transcript) {
  std::ifstream in(transcript);
  if (!in) return;  // an absent transcript replays nothing
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto rec = json::parse(line);
      responses_[rec.at("hash").get<std::string>()].push_back(rec.at("response").get<std::string>());
    } catch (const json::exception& e) {
      throw Error(Errc::InvalidArgument, "corrupt transcript record: " + std::string(e.what()));
    }
  }
}

std::string ReplayProvider::complete(const ChatRequest& req) {
  std::lock_guard lock(mu_);
  auto it = responses_.find(request_hash_hex(req));
  if (it == responses_.end() || it->second.empty())
    throw Error(Errc::ReplayMiss, "no recorded response for task '" + req.task + "'");
  auto text = std::move(it->second.front());
  it->second.pop_front();
  return text;
}

// ---- Gateway ----------------------------------------------------------------

Gateway::Gateway(std::shared_ptr<Provider> provider, GatewayOptions opts)
    : provider_(std::move(provider)), opts_(opts) {
  if (!provider_) throw Error(Errc::InvalidArgument, "gateway needs a provider");
  if (opts_.max_attempts < 1) opts_.max_attempts = 1;
}

std::string Gateway::call_with_retry(const ChatRequest& req) {
  if (req.system_prompt.empty() && req.user_prompt.empty())
    throw Error(Errc::InvalidArgument, "empty prompt");
  if (provider_->deterministic()) return provider_->complete(req);
  auto delay = opts_.backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return provider_->complete(req);
    } catch (const Error& e) {
      if (e.code() != Errc::GatewayUnavailable || attempt >= opts_.max_attempts) throw;
    }
    std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

ChatResponse Gateway::complete(const ChatRequest& req) {
  auto start = std::chrono::steady_clock::now();
  ChatResponse resp;
  resp.text = call_with_retry(req);
  if (resp.text.size() > req.max_output) resp.text.resize(req.max_output);
  resp.usage = {req.system_prompt.size() + req.user_prompt.size(), resp.text.size()};
  resp.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return resp;
}

ChatResponse Gateway::complete_structured(ChatRequest req, const json& schema) {
  if (schema.is_null() || (schema.is_object() && schema.empty()))
    throw Error(Errc::InvalidArgument, "structured completion needs a schema");
  req.schema = schema;
  std::string last_raw;
  std::string last_error;
  for (int attempt = 0; attempt < opts_.max_attempts; ++attempt) {
    auto resp = complete(req);
    last_raw = resp.text;
    auto value = extract_json(resp.text);
    if (!value) {
      last_error = "no JSON value in output";
      continue;
    }
    if (auto err = validate_schema(*value, schema)) {
      last_error = *err;
      continue;
    }
    resp.parsed = std::move(*value);
    resp.retries = attempt;
    return resp;
  }
  throw SchemaViolationError("task '" + req.task + "' failed validation after " +
                                 std::to_string(opts_.max_attempts) + " attempts: " + last_error,
                             last_raw);
}

// ---- schema + extraction ----------------------------------------------------

namespace {

bool type_matches(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  return false;
}

std::optional<std::string> validate_at(const json& v, const json& schema, const std::string& path) {
  if (!schema.is_object()) return std::nullopt;
  if (auto t = schema.find("type"); t != schema.end() && !type_matches(v, t->get<std::string>()))
    return path + ": expected " + t->get<std::string>();
  if (auto e = schema.find("enum"); e != schema.end()) {
    bool found = false;
    for (const auto& x : *e) found = found || x == v;
    if (!found) return path + ": value not in enum";
  }
  if (v.is_object()) {
    if (auto req = schema.find("required"); req != schema.end())
      for (const auto& name : *req)
        if (!v.contains(name.get<std::string>())) return path + ": missing '" + name.get<std::string>() + "'";
    const auto props = schema.value("properties", json::object());
    for (const auto& [k, sub] : v.items()) {
      if (props.contains(k)) {
        if (auto err = validate_at(sub, props[k], path + "." + k)) return err;
      } else if (auto ap = schema.find("additionalProperties"); ap != schema.end()) {
        if (ap->is_boolean() && !ap->get<bool>()) return path + ": unexpected '" + k + "'";
        if (ap->is_object())
          if (auto err = validate_at(sub, *ap, path + "." + k)) return err;
      }
    }
  }
  if (v.is_array()) {
    if (auto mi = schema.find("minItems"); mi != schema.end() && v.size() < mi->get<std::size_t>())
      return path + ": fewer than " + std::to_string(mi->get<std::size_t>()) + " items";
    if (auto items = schema.find("items"); items != schema.end())
      for (std::size_t i = 0; i < v.size(); ++i)
        if (auto err = validate_at(v[i], *items, path + "[" + std::to_string(i) + "]")) return err;
  }
  return std::nullopt;
}

std::optional<json> try_parse(std::string_view s) {
  auto j = json::parse(s.begin(), s.end(), nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

}  // namespace

std::optional<std::string> validate_schema(const json& value, const json& schema) {
  return validate_at(value, schema, "$");
}

std::optional<json> extract_json(std::string_view text) {
  if (auto j = try_parse(text)) return j;
  if (auto fence = text.find("```"); fence != std::string_view::npos) {
    auto start = text.find('\n', fence);
    auto end = start == std::string_view::npos ? start : text.find("```", start);
    if (end != std::string_view::npos)
      if (auto j = try_parse(text.substr(start + 1, end - start - 1))) return j;
  }
  for (auto [open, close] : {std::pair{'{', '}'}, std::pair{'[', ']'}}) {
    auto b = text.find(open);
    auto e = text.rfind(close);
    if (b != std::string_view::npos && e != std::string_view::npos && e > b)
      if (auto j = try_parse(text.substr(b, e - b + 1))) return j;
  }
  return std::nullopt;
}

}  // namespace rtspfuzz::llm
