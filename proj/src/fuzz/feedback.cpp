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

#include <algorithm>
#include <limits>

#include "rtspfuzz/error.hpp"
#include "rtspfuzz/fuzz/engine.hpp"

namespace rtspfuzz::fuzz {

FuzzInput to_input(const rtsp::SeedSequence& seed) {
  FuzzInput out;
  out.reserve(seed.requests.size());
  for (const auto& r : seed.requests) out.push_back(rtsp::serialize(r));
  return out;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(Errc::InvalidArgument, "Rng::below(0)");
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::weighted(const std::vector<double>& weights) {
  double total = 0;
  for (double w : weights) total += w;
  if (!(total > 0)) throw Error(Errc::InvalidArgument, "weights sum to zero");
  double r = unit() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (r < weights[i]) return i;
    r -= weights[i];
  }
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0) return i;
  return 0;
}

Trace execute(const FuzzInput& input, Target& target) {
  Trace t;
  target.reset();
  t.states.push_back(target.state());
  for (const auto& msg : input) {
    auto r = target.send(msg);
    t.probes.insert(t.probes.end(), r.probes.begin(), r.probes.end());
    TraceStep step;
    step.request = msg;
    if (auto sp = msg.find(' '); sp != std::string::npos) step.method = rtsp::parse_method(std::string_view(msg).substr(0, sp));
    step.state_after = target.state();
    if (r.fault != sim::Fault::None) {
      step.status_line = "FAULT " + r.fault_signature;
      t.steps.push_back(std::move(step));
      t.fault = r.fault;
      t.fault_signature = r.fault_signature;
      break;
    }
    step.status = r.response->status;
    step.status_line = std::string(r.response->version) + " " + std::to_string(r.response->status) + " " + r.response->reason;
    t.steps.push_back(std::move(step));
    if (t.states.back() != target.state()) t.states.push_back(target.state());
  }
  std::sort(t.probes.begin(), t.probes.end());
  t.probes.erase(std::unique(t.probes.begin(), t.probes.end()), t.probes.end());
  return t;
}

std::size_t CoverageMap::add(const std::vector<sim::ProbeId>& probes) {
  std::size_t fresh = 0;
  for (auto p : probes) {
    auto& b = bits_[p & (kSize - 1)];
    if (b == 0) {
      ++fresh;
      ++count_;
    }
    if (b < 255) ++b;
  }
  return fresh;
}

StateGraph::Delta StateGraph::update(const Trace& t) {
  Delta d;
  int prev = kStart;
  for (const auto& s : t.steps) {
    if (s.status == 0) break;
    auto [nit, new_node] = nodes_.try_emplace(s.status, 0);
    ++nit->second;
    if (new_node) ++d.new_nodes;
    std::string method = s.method ? std::string(rtsp::method_name(*s.method)) : "UNKNOWN";
    auto [eit, new_edge] = edges_.try_emplace(Edge{prev, s.status, std::move(method)}, 0);
    ++eit->second;
    if (new_edge) ++d.new_edges;
    prev = s.status;
  }
  return d;
}

std::size_t StateGraph::hits(int node) const {
  auto it = nodes_.find(node);
  return it == nodes_.end() ? 0 : it->second;
}

bool PlateauDetector::check(std::size_t execution) {
  if (execution < last_ + window_) return false;
  last_ = execution;
  return true;
}

double seed_weight(const SeedEntry& e, const StateGraph& g) {
  std::size_t rare = std::numeric_limits<std::size_t>::max();
  for (int n : e.nodes) rare = std::min(rare, g.hits(n));
  double rarity = rare == std::numeric_limits<std::size_t>::max() ? 1.0 : 1.0 + 16.0 / (16.0 + static_cast<double>(rare));
  return (e.found_new_state ? 4.0 : 1.0) * rarity;
}

std::size_t select_seed(const std::vector<SeedEntry>& corpus, const StateGraph& g, Rng& rng) {
  if (corpus.empty()) throw Error(Errc::InvalidArgument, "empty corpus");
  if (corpus.size() == 1) return 0;
  std::vector<double> w;
  w.reserve(corpus.size());
  for (const auto& e : corpus) w.push_back(seed_weight(e, g));
  return rng.weighted(w);
}

}  // namespace rtspfuzz::fuzz
