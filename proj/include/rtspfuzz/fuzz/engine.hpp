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

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtspfuzz/crews/crews.hpp"
#include "rtspfuzz/rtsp/grammar.hpp"
#include "rtspfuzz/rtsp/seed.hpp"
#include "rtspfuzz/sim/server.hpp"

namespace rtspfuzz::fuzz {

using json = nlohmann::json;

// A fuzz input: raw request messages sent in order. Mutation may leave them malformed.
using FuzzInput = std::vector<std::string>;

FuzzInput to_input(const rtsp::SeedSequence& seed);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  // Uniform in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  double unit();  // [0, 1)
  bool chance(double p) { return unit() < p; }
  // Index drawn proportionally to non-negative weights; their sum must be positive.
  std::size_t weighted(const std::vector<double>& weights);

 private:
  std::mt19937_64 eng_;
};

// ---- target -----------------------------------------------------------------------

class Target {
 public:
  virtual ~Target() = default;
  virtual void reset() = 0;
  virtual sim::HandleResult send(std::string_view bytes) = 0;
  virtual rtsp::State state() const = 0;
};

class SimTarget final : public Target {
 public:
  explicit SimTarget(sim::SimConfig cfg = {}) : server_(cfg) {}
  void reset() override { server_.reset(); }
  sim::HandleResult send(std::string_view bytes) override { return server_.handle_raw(bytes); }
  rtsp::State state() const override { return server_.state(); }

 private:
  sim::SimServer server_;
};

struct TraceStep {
  std::string request;
  std::optional<rtsp::Method> method;
  int status = 0;  // 0 when a fault fired
  std::string status_line;
  rtsp::State state_after = rtsp::State::Init;
};

struct Trace {
  std::vector<TraceStep> steps;
  std::vector<sim::ProbeId> probes;    // distinct, ascending
  std::vector<rtsp::State> states;     // FSM states visited, starting with INIT
  sim::Fault fault = sim::Fault::None;
  std::string fault_signature;

  bool crashed() const noexcept { return fault != sim::Fault::None; }
};

// Resets the target, then sends each message until a fault fires.
Trace execute(const FuzzInput& input, Target& target);

// ---- feedback ---------------------------------------------------------------------

class CoverageMap {
 public:
  static constexpr std::size_t kSize = 1 << 16;
  CoverageMap() : bits_(kSize, 0) {}
  // Returns the number of slots hit for the first time.
  std::size_t add(const std::vector<sim::ProbeId>& probes);
  bool has(sim::ProbeId p) const { return bits_[p & (kSize - 1)] != 0; }
  std::size_t count() const noexcept { return count_; }

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t count_ = 0;
};

// Nodes are observed response status codes. Each execution's first edge leaves kStart,
// which is not counted as a node.
class StateGraph {
 public:
  static constexpr int kStart = 0;
  using Edge = std::tuple<int, int, std::string>;  // from, to, method token or UNKNOWN

  struct Delta {
    std::size_t new_nodes = 0;
    std::size_t new_edges = 0;
  };
  Delta update(const Trace& t);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::map<int, std::size_t>& nodes() const noexcept { return nodes_; }
  const std::map<Edge, std::size_t>& edges() const noexcept { return edges_; }
  std::size_t hits(int node) const;

 private:
  std::map<int, std::size_t> nodes_;
  std::map<Edge, std::size_t> edges_;
};

class PlateauDetector {
 public:
  explicit PlateauDetector(std::size_t window) : window_(window) {}
  void progress(std::size_t execution) { last_ = execution; }
  // True when `execution` is at least `window` past the last progress; re-arms on firing.
  bool check(std::size_t execution);
  std::size_t last_progress() const noexcept { return last_; }
  std::size_t window() const noexcept { return window_; }

 private:
  std::size_t window_;
  std::size_t last_ = 0;
};

// ---- mutation ---------------------------------------------------------------------

enum class MutationOp { BitFlip, ByteFlip, Arith, BlockDup, BlockDelete, DictSplice, TemplateSub };
inline constexpr std::array<MutationOp, 7> kAllOps = {MutationOp::BitFlip,   MutationOp::ByteFlip,
                                                      MutationOp::Arith,     MutationOp::BlockDup,
                                                      MutationOp::BlockDelete, MutationOp::DictSplice,
                                                      MutationOp::TemplateSub};
std::string_view op_name(MutationOp op) noexcept;

struct MutatorConfig {
  std::array<double, 7> weights = {1.0, 1.0, 1.5, 1.0, 0.75, 2.0, 2.0};
  std::size_t max_messages = 16;
  std::size_t max_message_bytes = 2048;
};

struct MutationContext {
  const std::vector<rtsp::GrammarTemplate>* templates = nullptr;
  const std::vector<std::string>* dictionary = nullptr;
  const std::vector<std::string>* values = nullptr;  // placeholder bindings
};

class Mutator {
 public:
  explicit Mutator(MutatorConfig cfg = {}) : cfg_(cfg) {}
  // Draws an operator among those usable with this context (TemplateSub needs templates).
  MutationOp pick(Rng& rng, const MutationContext& ctx) const;
  FuzzInput apply(MutationOp op, const FuzzInput& in, Rng& rng, const MutationContext& ctx) const;
  FuzzInput mutate(const FuzzInput& in, Rng& rng, const MutationContext& ctx, MutationOp* chosen = nullptr) const;
  const MutatorConfig& config() const noexcept { return cfg_; }

 private:
  MutatorConfig cfg_;
};

// Tokens harvested from requests: method tokens, header names, header values and their
// ';' / '=' / ',' separated parts. Sorted and unique.
std::vector<std::string> harvest_tokens(const std::vector<rtsp::SeedSequence>& seeds);
std::vector<std::string> template_tokens(const std::vector<rtsp::GrammarTemplate>& templates);
const std::vector<std::string>& default_values();

// ---- corpus -----------------------------------------------------------------------

struct SeedEntry {
  FuzzInput input;
  std::string origin;             // initial, enriched, mutation, plateau
  std::size_t probes_hit = 0;
  bool found_new_state = false;
  std::vector<int> nodes;         // status nodes visited by its last execution
  std::vector<crews::Exchange> exchanges;
  rtsp::State final_state = rtsp::State::Init;
};

// Favors seeds that found new states and seeds that touch rarely hit status nodes.
double seed_weight(const SeedEntry& e, const StateGraph& g);
std::size_t select_seed(const std::vector<SeedEntry>& corpus, const StateGraph& g, Rng& rng);

// ---- campaign ---------------------------------------------------------------------

struct CrewToggles {
  bool grammar = false;
  bool enrichment = false;
  bool plateau = false;
  bool any() const noexcept { return grammar || enrichment || plateau; }
};

struct CampaignConfig {
  std::size_t budget = 10000;
  std::uint64_t rng_seed = 1;
  CrewToggles crews;
  std::size_t plateau_window = 2000;
  std::size_t plateau_cap = 10;
  std::size_t sample_every = 1000;
  std::size_t max_stack = 4;
  MutatorConfig mutator;
};

struct SeriesPoint {
  std::size_t executions = 0;
  std::size_t branches = 0;
  std::size_t states = 0;
  std::size_t transitions = 0;
};

struct CrashRecord {
  std::string signature;
  std::size_t first_execution = 0;
  std::string input;
};

struct InjectedPacket {
  std::size_t execution = 0;
  std::string packet;
  bool parses = false;
  std::vector<std::string> cve_refs;
};

struct CampaignStats {
  std::size_t executions = 0;
  std::size_t branches = 0;
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::vector<SeriesPoint> series;
  std::vector<CrashRecord> crashes;
  std::size_t corpus_size = 0;
  std::size_t plateau_triggers = 0;
  std::size_t plateau_invocations = 0;
  std::size_t plateau_failures = 0;
  std::vector<InjectedPacket> injected;
  std::size_t grammar_templates = 0;
  std::size_t enriched_seeds = 0;
  std::size_t enrichment_failures = 0;
  std::vector<std::string> warnings;
  StateGraph graph;
};

// Crew plumbing; null members disable the matching hook.
struct CrewSuite {
  crews::CrewContext* ctx = nullptr;
  cve::CveClient* cves = nullptr;
};

// Throws CampaignAborted when the seed list is empty or the target fails to start.
CampaignStats run_campaign(const CampaignConfig& cfg, const std::vector<rtsp::SeedSequence>& seeds, Target& target,
                           CrewSuite crews = {});

json campaign_config_json(const CampaignConfig& cfg);
// Deterministic: no clocks, no host data. `run_config` is echoed verbatim.
json report_json(const CampaignStats& s, const json& run_config);
std::string series_csv(const CampaignStats& s);

}  // namespace rtspfuzz::fuzz
