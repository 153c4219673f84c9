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
#include <cctype>
#include <set>

#include "rtspfuzz/error.hpp"
#include "rtspfuzz/fuzz/engine.hpp"

namespace rtspfuzz::fuzz {

namespace {

bool delimiter(char c) {
  return c == ' ' || c == ':' || c == ';' || c == '=' || c == ',' || c == '\r' || c == '\n' || c == '/';
}

struct Span {
  std::size_t begin;
  std::size_t len;
};

std::vector<Span> tokens_of(const std::string& s) {
  std::vector<Span> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && delimiter(s[i])) ++i;
    std::size_t b = i;
    while (i < s.size() && !delimiter(s[i])) ++i;
    if (i > b) out.push_back({b, i - b});
  }
  return out;
}

std::vector<Span> numbers_of(const std::string& s) {
  std::vector<Span> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    std::size_t b = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (b > 0 && s[b - 1] == '-') --b;
    out.push_back({b, i - b});
  }
  return out;
}

std::size_t pick_message(const FuzzInput& in, Rng& rng) {
  std::vector<std::size_t> nonempty;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (!in[i].empty()) nonempty.push_back(i);
  if (nonempty.empty()) return in.size();
  return nonempty[rng.below(nonempty.size())];
}

void split_parts(std::string_view v, std::set<std::string>& out) {
  std::string cur;
  for (char c : v) {
    if (c == ';' || c == '=' || c == ',') {
      if (!cur.empty()) out.insert(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.insert(cur);
}

}  // namespace

std::string_view op_name(MutationOp op) noexcept {
  switch (op) {
    case MutationOp::BitFlip: return "bitflip";
    case MutationOp::ByteFlip: return "byteflip";
    case MutationOp::Arith: return "arith";
    case MutationOp::BlockDup: return "block_dup";
    case MutationOp::BlockDelete: return "block_delete";
    case MutationOp::DictSplice: return "dict_splice";
    case MutationOp::TemplateSub: return "template_sub";
  }
  return "?";
}

MutationOp Mutator::pick(Rng& rng, const MutationContext& ctx) const {
  std::vector<double> w(cfg_.weights.begin(), cfg_.weights.end());
  if (!ctx.templates || ctx.templates->empty()) w[static_cast<std::size_t>(MutationOp::TemplateSub)] = 0;
  if (!ctx.dictionary || ctx.dictionary->empty()) w[static_cast<std::size_t>(MutationOp::DictSplice)] = 0;
  return kAllOps[rng.weighted(w)];
}

FuzzInput Mutator::mutate(const FuzzInput& in, Rng& rng, const MutationContext& ctx, MutationOp* chosen) const {
  auto op = pick(rng, ctx);
  if (chosen) *chosen = op;
  return apply(op, in, rng, ctx);
}

FuzzInput Mutator::apply(MutationOp op, const FuzzInput& in, Rng& rng, const MutationContext& ctx) const {
  FuzzInput out = in;
  auto i = pick_message(out, rng);
  if (i == out.size()) {
    out.push_back("OPTIONS * RTSP/1.0\r\nCSeq: 1\r\n\r\n");
    return out;
  }
  auto& msg = out[i];

  switch (op) {
    case MutationOp::BitFlip: {
      auto bit = rng.below(msg.size() * 8);
      msg[bit / 8] = static_cast<char>(msg[bit / 8] ^ (1u << (bit % 8)));
      break;
    }
    case MutationOp::ByteFlip: {
      auto pos = rng.below(msg.size());
      msg[pos] = static_cast<char>(msg[pos] ^ 0xFF);
      break;
    }
    case MutationOp::Arith: {
      long long delta = static_cast<long long>(rng.below(35)) + 1;
      if (rng.chance(0.5)) delta = -delta;
      auto nums = numbers_of(msg);
      if (nums.empty()) {
        auto pos = rng.below(msg.size());
        msg[pos] = static_cast<char>(static_cast<unsigned char>(msg[pos]) + delta);
        break;
      }
      auto n = nums[rng.below(nums.size())];
      auto text = msg.substr(n.begin, n.len);
      long long v = 0;
      try {
        v = text.size() > 18 ? 0 : std::stoll(text);
      } catch (const std::exception&) {
        v = 0;
      }
      msg.replace(n.begin, n.len, std::to_string(v + delta));
      break;
    }
    case MutationOp::BlockDup: {
      if (out.size() >= cfg_.max_messages) return apply(MutationOp::BitFlip, in, rng, ctx);
      auto copy = msg;
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(copy));
      break;
    }
    case MutationOp::BlockDelete: {
      if (out.size() > 1) {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
        break;
      }
      auto len = 1 + rng.below(std::min<std::size_t>(16, msg.size()));
      auto pos = rng.below(msg.size() - len + 1);
      msg.erase(pos, len);
      break;
    }
    case MutationOp::DictSplice: {
      if (!ctx.dictionary || ctx.dictionary->empty()) return apply(MutationOp::ByteFlip, in, rng, ctx);
      const auto& tok = (*ctx.dictionary)[rng.below(ctx.dictionary->size())];
      auto spans = tokens_of(msg);
      if (spans.empty()) {
        msg.insert(rng.below(msg.size() + 1), tok);
        break;
      }
      auto s = spans[rng.below(spans.size())];
      msg.replace(s.begin, s.len, tok);
      break;
    }
    case MutationOp::TemplateSub: {
      if (!ctx.templates || ctx.templates->empty()) return apply(MutationOp::DictSplice, in, rng, ctx);
      rtsp::RtspRequest orig;
      try {
        orig = rtsp::parse_request_lenient(msg).request;
      } catch (const Error&) {
        return apply(MutationOp::DictSplice, in, rng, ctx);
      }
      const auto& all = *ctx.templates;
      std::vector<const rtsp::GrammarTemplate*> same;
      for (const auto& t : all)
        if (rtsp::method_name(t.method) == orig.method) same.push_back(&t);
      const auto& t = (!same.empty() && rng.chance(0.5)) ? *same[rng.below(same.size())] : all[rng.below(all.size())];

      static const std::vector<std::string> fallback = {"0"};
      const auto& values = ctx.values && !ctx.values->empty() ? *ctx.values : fallback;
      std::vector<std::string> bindings;
      std::vector<std::size_t> header_slots;
      for (std::size_t li = 0; li < t.lines.size(); ++li) {
        const auto& line = t.lines[li];
        std::string name = li == 0 ? "" : line.substr(0, line.find(':'));
        for (auto p = line.find(rtsp::kPlaceholder); p != std::string::npos; p = line.find(rtsp::kPlaceholder, p + 1)) {
          if (li == 0) {
            bindings.push_back(bindings.empty() && !orig.uri.empty() ? orig.uri : values[rng.below(values.size())]);
          } else {
            header_slots.push_back(bindings.size());
            const auto* have = orig.headers.find(name);
            bindings.push_back(have ? *have : values[rng.below(values.size())]);
          }
        }
      }
      if (!header_slots.empty()) bindings[header_slots[rng.below(header_slots.size())]] = values[rng.below(values.size())];
      rtsp::RtspRequest req;
      try {
        req = rtsp::instantiate_template(t, bindings);
      } catch (const Error&) {
        return apply(MutationOp::DictSplice, in, rng, ctx);
      }
      for (const auto& [name, value] : orig.headers.items())
        if (!req.headers.contains(name) && !rtsp::iequals(name, "Content-Length")) req.headers.add(name, value);
      req.body = orig.body;
      if (!req.body.empty()) req.headers.erase("Content-Length");
      msg = rtsp::serialize(req);
      break;
    }
  }
  for (auto& m : out)
    if (m.size() > cfg_.max_message_bytes) m.resize(cfg_.max_message_bytes);
  return out;
}

std::vector<std::string> harvest_tokens(const std::vector<rtsp::SeedSequence>& seeds) {
  std::set<std::string> out;
  for (const auto& s : seeds)
    for (const auto& r : s.requests) {
      out.insert(r.method);
      for (const auto& [name, value] : r.headers.items()) {
        if (rtsp::iequals(name, "Content-Length")) continue;
        out.insert(name);
        out.insert(value);
        split_parts(value, out);
      }
      std::size_t pos = 0;
      while (pos < r.body.size()) {
        auto nl = r.body.find('\n', pos);
        auto line = r.body.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? r.body.size() : nl + 1;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        out.insert(line.substr(0, line.find(':')));
      }
    }
  return {out.begin(), out.end()};
}

std::vector<std::string> template_tokens(const std::vector<rtsp::GrammarTemplate>& templates) {
  std::set<std::string> out;
  for (const auto& t : templates) {
    out.insert(std::string(rtsp::method_name(t.method)));
    for (std::size_t i = 1; i < t.lines.size(); ++i) out.insert(t.lines[i].substr(0, t.lines[i].find(':')));
  }
  return {out.begin(), out.end()};
}

const std::vector<std::string>& default_values() {
  static const std::vector<std::string> v = {
      "0",
      "1",
      "-1",
      "65535",
      "application/sdp",
      "text/parameters",
      "text/plain",
      "RTP/AVP;unicast;client_port=8000-8001",
      "RTP/AVP/TCP;unicast;interleaved=0-1",
      "RTP/AVP;multicast",
      "RTP/AVP;unicast;client_port=8000-8001;mode=record",
      "npt=0.000-",
      "npt=now-",
      "npt=abc",
      "clock=19961108T142300Z-",
      "smpte=10:07:00-",
      "2.0",
      "-1.5",
      "000022B8",
      "rtsp://127.0.0.1:8554/stream",
      "Basic dXNlcjpwYXNz",
      "implicit-play",
  };
  return v;
}

}  // namespace rtspfuzz::fuzz
