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

#include "rtspfuzz/cve/client.hpp"

#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "rtspfuzz/error.hpp"

namespace rtspfuzz::cve {

using json = nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::set<std::string> words(std::string_view text) {
  std::set<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.insert(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.insert(cur);
  return out;
}

json to_json(const std::vector<CveRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    json j = {{"id", r.id}, {"description", r.description}, {"published", r.published}};
    j["severity"] = r.severity ? json(*r.severity) : json(nullptr);
    arr.push_back(j);
  }
  return arr;
}

std::vector<CveRecord> from_json(const json& arr) {
  std::vector<CveRecord> out;
  for (const auto& j : arr) {
    CveRecord r{j.at("id").get<std::string>(), j.at("description").get<std::string>(), std::nullopt,
                j.value("published", std::string{})};
    if (j.contains("severity") && j["severity"].is_number()) r.severity = j["severity"].get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

bool valid_cve_id(std::string_view id) {
  static const std::regex re(R"(CVE-[0-9]{4}-[0-9]{4,})");
  return std::regex_match(id.begin(), id.end(), re);
}

std::vector<CveRecord> parse_nvd(const json& doc) {
  std::vector<CveRecord> out;
  if (!doc.contains("vulnerabilities")) return out;
  for (const auto& v : doc["vulnerabilities"]) {
    if (!v.contains("cve")) continue;
    const auto& c = v["cve"];
    CveRecord r;
    r.id = c.value("id", std::string{});
    if (!valid_cve_id(r.id)) continue;
    for (const auto& d : c.value("descriptions", json::array()))
      if (d.value("lang", "") == "en") {
        r.description = d.value("value", std::string{});
        break;
      }
    if (r.description.empty()) continue;
    r.published = c.value("published", std::string{}).substr(0, 10);
    if (c.contains("metrics")) {
      for (const char* key : {"cvssMetricV31", "cvssMetricV30", "cvssMetricV2"}) {
        if (!c["metrics"].contains(key) || c["metrics"][key].empty()) continue;
        const auto& m = c["metrics"][key][0];
        if (m.contains("cvssData") && m["cvssData"].contains("baseScore")) {
          r.severity = m["cvssData"]["baseScore"].get<double>();
          break;
        }
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CveRecord> FixtureFetcher::fetch(const std::string& keyword) {
  auto path = dir_ / (lower(keyword) + ".json");
  if (!std::filesystem::exists(path)) return {};
  std::ifstream in(path);
  auto doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::CveUnavailable, "fixture " + path.string() + " is not valid JSON");
  return parse_nvd(doc);
}

CveClient::CveClient(std::shared_ptr<Fetcher> fetcher, std::optional<std::filesystem::path> cache_dir,
                     std::chrono::seconds ttl, Clock clock)
    : fetcher_(std::move(fetcher)), cache_dir_(std::move(cache_dir)), ttl_(ttl), clock_(std::move(clock)) {
  if (!clock_) clock_ = [] { return std::chrono::system_clock::now(); };
}

std::filesystem::path CveClient::cache_file(const std::string& keyword) const {
  std::string name;
  for (char c : lower(keyword)) name.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return *cache_dir_ / (name + ".json");
}

std::vector<CveRecord> CveClient::fetch_cves(const std::string& keyword) {
  std::lock_guard lock(mu_);
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(clock_().time_since_epoch()).count();
  std::optional<std::vector<CveRecord>> stale;
  if (cache_dir_) {
    std::ifstream in(cache_file(keyword));
    auto doc = in ? json::parse(in, nullptr, false) : json();
    if (in && !doc.is_discarded() && doc.is_object()) {
      try {
        auto records = from_json(doc.at("records"));
        if (now - doc.at("fetched_at").get<long long>() < ttl_.count()) return records;
        stale = std::move(records);
      } catch (const json::exception&) {
      }
    }
  }
  std::vector<CveRecord> records;
  try {
    if (!fetcher_) throw Error(Errc::CveUnavailable, "no CVE source configured");
    records = fetcher_->fetch(keyword);
  } catch (const Error& e) {
    if (stale) return *stale;
    throw Error(Errc::CveUnavailable, std::string(e.what()));
  }
  if (cache_dir_) {
    std::filesystem::create_directories(*cache_dir_);
    std::ofstream out(cache_file(keyword), std::ios::trunc);
    out << json{{"keyword", keyword}, {"fetched_at", now}, {"records", to_json(records)}}.dump(1) << '\n';
  }
  return records;
}

std::vector<CveRecord> relevance_filter(const std::vector<CveRecord>& cves, const std::vector<std::string>& vocabulary) {
  std::set<std::string> vocab;
  for (const auto& v : vocabulary) vocab.insert(lower(v));
  std::vector<CveRecord> out;
  for (const auto& c : cves) {
    for (const auto& w : words(c.description))
      if (vocab.count(w)) {
        out.push_back(c);
        break;
      }
  }
  return out;
}

}  // namespace rtspfuzz::cve
