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
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace rtspfuzz::cve {

struct CveRecord {
  std::string id;
  std::string description;
  std::optional<double> severity;
  std::string published;  // YYYY-MM-DD

  friend bool operator==(const CveRecord&, const CveRecord&) = default;
};

bool valid_cve_id(std::string_view id);

// Reads an NVD 2.0 "vulnerabilities" document. Records with bad ids or empty
// descriptions are skipped.
std::vector<CveRecord> parse_nvd(const nlohmann::json& doc);

class Fetcher {
 public:
  virtual ~Fetcher() = default;
  // Throws CveUnavailable when the source cannot be reached.
  virtual std::vector<CveRecord> fetch(const std::string& keyword) = 0;
};

// Serves <dir>/<keyword>.json snapshots; unknown keywords yield nothing.
class FixtureFetcher final : public Fetcher {
 public:
  explicit FixtureFetcher(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::vector<CveRecord> fetch(const std::string& keyword) override;

 private:
  std::filesystem::path dir_;
};

struct NvdConfig {
  std::string host = "https://services.nvd.nist.gov";
  std::string path = "/rest/json/cves/2.0";
  std::string api_key_env = "NVD_API_KEY";
  std::chrono::seconds timeout{20};
};

// Keyword search against the NVD REST API.
class NvdFetcher final : public Fetcher {
 public:
  explicit NvdFetcher(NvdConfig cfg = {}) : cfg_(std::move(cfg)) {}
  std::vector<CveRecord> fetch(const std::string& keyword) override;

 private:
  NvdConfig cfg_;
};

using Clock = std::function<std::chrono::system_clock::time_point()>;

// Cache layout: one JSON file per keyword, {"keyword", "fetched_at" (unix seconds), "records"}.
class CveClient {
 public:
  static constexpr std::chrono::hours kDefaultTtl{24 * 7};

  CveClient(std::shared_ptr<Fetcher> fetcher, std::optional<std::filesystem::path> cache_dir,
            std::chrono::seconds ttl = kDefaultTtl, Clock clock = {});

  // Fresh cache entries win; otherwise the fetcher is asked and the cache refreshed.
  // A failed fetch falls back to a stale entry, else throws CveUnavailable.
  std::vector<CveRecord> fetch_cves(const std::string& keyword);

 private:
  std::filesystem::path cache_file(const std::string& keyword) const;

  std::shared_ptr<Fetcher> fetcher_;
  std::optional<std::filesystem::path> cache_dir_;
  std::chrono::seconds ttl_;
  Clock clock_;
  std::mutex mu_;
};

// Keeps records whose description shares a word with the history vocabulary
// (method and header names), compared case-insensitively. Order is preserved.
std::vector<CveRecord> relevance_filter(const std::vector<CveRecord>& cves, const std::vector<std::string>& vocabulary);

}  // namespace rtspfuzz::cve
