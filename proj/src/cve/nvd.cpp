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

#include "rtspfuzz/cve/client.hpp"
#include "rtspfuzz/error.hpp"

namespace rtspfuzz::cve {

std::vector<CveRecord> NvdFetcher::fetch(const std::string& keyword) {
  httplib::Client cli(cfg_.host);
  cli.set_connection_timeout(cfg_.timeout);
  cli.set_read_timeout(cfg_.timeout);
  httplib::Headers headers;
  if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key) headers.emplace("apiKey", key);
  httplib::Params params{{"keywordSearch", keyword}};
  auto res = cli.Get(cfg_.path, params, headers);
  if (!res) throw Error(Errc::CveUnavailable, "NVD unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error(Errc::CveUnavailable, "NVD returned HTTP " + std::to_string(res->status));
  auto doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::CveUnavailable, "NVD payload is not JSON");
  return parse_nvd(doc);
}

}  // namespace rtspfuzz::cve
