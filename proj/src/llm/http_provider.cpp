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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <fstream>

#include "rtspfuzz/llm/gateway.hpp"

namespace rtspfuzz::llm {

HttpProviderConfig HttpProviderConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open provider config " + path.string());
  HttpProviderConfig cfg;
  try {
    auto j = json::parse(in);
    cfg.endpoint = j.at("endpoint").get<std::string>();
    cfg.api_key_env = j.value("api_key_env", cfg.api_key_env);
    cfg.default_model = j.value("model_id", cfg.default_model);
    if (j.contains("profiles")) cfg.profiles = j["profiles"].get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, "bad provider config: " + std::string(e.what()));
  }
  return cfg;
}

HttpChatProvider::HttpChatProvider(HttpProviderConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.endpoint.empty()) throw Error(Errc::InvalidArgument, "provider endpoint is empty");
}

std::string HttpChatProvider::complete(const ChatRequest& req) {
  if (req.timeout.count() <= 0) throw Error(Errc::GatewayTimeout, "request timeout budget is zero");
  const char* key = std::getenv(cfg_.api_key_env.c_str());
  if (!key || !*key) throw Error(Errc::GatewayUnavailable, "environment variable " + cfg_.api_key_env + " is not set");

  // longest matching task prefix picks the model
  std::string model = req.model_id != "default" ? req.model_id : cfg_.default_model;
  std::size_t best = 0;
  for (const auto& [prefix, id] : cfg_.profiles)
    if (req.task.rfind(prefix, 0) == 0 && prefix.size() >= best) {
      best = prefix.size();
      model = id;
    }

  json body = {
      {"model", model},
      {"temperature", req.temperature},
      {"messages", json::array({{{"role", "system"}, {"content", req.system_prompt}},
                                {{"role", "user"}, {"content", req.user_prompt}}})},
  };
  if (req.schema) body["response_format"] = {{"type", "json_object"}};

  std::lock_guard lock(mu_);
  httplib::Client cli(cfg_.endpoint);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(req.timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(req.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  cli.set_bearer_token_auth(key);
  auto res = cli.Post("/v1/chat/completions", body.dump(), "application/json");
  if (!res) {
    if (res.error() == httplib::Error::Read || res.error() == httplib::Error::ConnectionTimeout)
      throw Error(Errc::GatewayTimeout, "provider timed out: " + httplib::to_string(res.error()));
    throw Error(Errc::GatewayUnavailable, "provider unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200)
    throw Error(Errc::GatewayUnavailable, "provider returned HTTP " + std::to_string(res->status));
  try {
    auto j = json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(Errc::GatewayUnavailable, "unexpected provider payload: " + std::string(e.what()));
  }
}

}  // namespace rtspfuzz::llm
