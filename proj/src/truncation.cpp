// Copyright 2026 The textguide Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "textguide/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "json.hpp"
#include "textguide/error.hpp"
#include "textguide/parallel.hpp"

namespace textguide {

namespace {

constexpr double kFractionEpsilon = 1e-9;
constexpr std::uint32_t kNone = static_cast<std::uint32_t>(-1);

TokenSequence slice(std::span<const std::string> tokens, std::size_t begin, std::size_t end) {
  return TokenSequence(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                       tokens.begin() + static_cast<std::ptrdiff_t>(end));
}

Segment plain_segment(Segment::Kind kind, std::size_t length) {
  Segment s;
  s.kind = kind;
  s.length = length;
  return s;
}

Truncation identity(std::span<const std::string> tokens) {
  Truncation out;
  out.tokens.assign(tokens.begin(), tokens.end());
  out.segments.push_back(plain_segment(Segment::Kind::kHead, tokens.size()));
  return out;
}

// Alive residual positions as a doubly linked list over original indices.
class Residual {
 public:
  Residual(std::size_t begin, std::size_t end, std::size_t total)
      : prev_(total, kNone), next_(total, kNone), alive_(total, 0) {
    for (std::size_t i = begin; i < end; ++i) {
      alive_[i] = 1;
      prev_[i] = i > begin ? static_cast<std::uint32_t>(i - 1) : kNone;
      next_[i] = i + 1 < end ? static_cast<std::uint32_t>(i + 1) : kNone;
    }
    head_ = begin < end ? static_cast<std::uint32_t>(begin) : kNone;
    size_ = end > begin ? end - begin : 0;
  }

  bool alive(std::size_t i) const { return alive_[i] != 0; }
  std::uint32_t prev(std::uint32_t i) const { return prev_[i]; }
  std::uint32_t next(std::uint32_t i) const { return next_[i]; }
  std::uint32_t front() const { return head_; }
  std::size_t size() const { return size_; }

  void erase(std::uint32_t i) {
    const auto p = prev_[i];
    const auto n = next_[i];
    if (p != kNone) next_[p] = n;
    else head_ = n;
    if (n != kNone) prev_[n] = p;
    alive_[i] = 0;
    --size_;
  }

 private:
  std::vector<std::uint32_t> prev_;
  std::vector<std::uint32_t> next_;
  std::vector<char> alive_;
  std::uint32_t head_ = kNone;
  std::size_t size_ = 0;
};

}  // namespace

std::size_t fraction_of(double fraction, std::size_t nta) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(nta) + kFractionEpsilon));
}

void TruncationConfig::validate() const {
  if (nta < 1) throw Error(ErrorCode::kInvalidArgument, "nta must be >= 1");
  if (!(part1 >= 0.0 && part1 <= 1.0) || !(part2 >= 0.0 && part2 <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "part1 and part2 must lie in [0, 1]");
  }
  if (part1 + part2 > 1.0 + kFractionEpsilon) {
    throw Error(ErrorCode::kInvalidSplit, "part1 + part2 must not exceed 1");
  }
  if (hybrid_factor && !(*hybrid_factor >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "hybrid_factor must be >= 1");
  }
}

std::size_t TruncationConfig::head_budget() const { return std::min(fraction_of(part1, nta), nta); }

std::size_t TruncationConfig::tail_budget() const {
  return std::min(fraction_of(part2, nta), nta - head_budget());
}

std::size_t TruncationConfig::fill_budget() const { return nta - head_budget() - tail_budget(); }

Strategy parse_strategy(std::string_view name) {
  if (name == "identity") return Strategy::kIdentity;
  if (name == "head") return Strategy::kHead;
  if (name == "tail") return Strategy::kTail;
  if (name == "head_tail") return Strategy::kHeadTail;
  if (name == "text_guide") return Strategy::kTextGuide;
  if (name == "hybrid") return Strategy::kHybrid;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown strategy '" + std::string(name) + "' (valid: " + strategy_names() + ")");
}

std::string_view strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::kIdentity: return "identity";
    case Strategy::kHead: return "head";
    case Strategy::kTail: return "tail";
    case Strategy::kHeadTail: return "head_tail";
    case Strategy::kTextGuide: return "text_guide";
    case Strategy::kHybrid: return "hybrid";
  }
  return "unknown";
}

std::string strategy_names() { return "identity, head, tail, head_tail, text_guide, hybrid"; }

bool strategy_needs_sitfl(Strategy strategy) {
  return strategy == Strategy::kTextGuide || strategy == Strategy::kHybrid;
}

std::string_view segment_kind_name(Segment::Kind kind) {
  switch (kind) {
    case Segment::Kind::kHead: return "head";
    case Segment::Kind::kGroup: return "group";
    case Segment::Kind::kTail: return "tail";
    case Segment::Kind::kPad: return "pad";
  }
  return "unknown";
}

TokenSequence truncate_head(std::span<const std::string> tokens, std::size_t nta) {
  return slice(tokens, 0, std::min(tokens.size(), nta));
}

TokenSequence truncate_tail(std::span<const std::string> tokens, std::size_t nta) {
  const std::size_t keep = std::min(tokens.size(), nta);
  return slice(tokens, tokens.size() - keep, tokens.size());
}

namespace {

Truncation head_tail_traced(std::span<const std::string> tokens, std::size_t nta, double part1,
                            double part2) {
  if (std::fabs(part1 + part2 - 1.0) > kFractionEpsilon) {
    throw Error(ErrorCode::kInvalidSplit, "head_tail needs part1 + part2 == 1");
  }
  if (tokens.size() <= nta) return identity(tokens);
  const std::size_t head = std::min(fraction_of(part1, nta), nta);
  const std::size_t tail = nta - head;
  Truncation out;
  out.tokens = slice(tokens, 0, head);
  out.tokens.insert(out.tokens.end(), tokens.end() - static_cast<std::ptrdiff_t>(tail), tokens.end());
  out.segments.push_back(plain_segment(Segment::Kind::kHead, head));
  out.segments.push_back(plain_segment(Segment::Kind::kTail, tail));
  return out;
}

}  // namespace

TokenSequence truncate_head_tail(std::span<const std::string> tokens, std::size_t nta,
                                 double part1, double part2) {
  return head_tail_traced(tokens, nta, part1, part2).tokens;
}

Truncation text_guide_traced(std::span<const std::string> tokens, const Sitfl& sitfl,
                             const TruncationConfig& cfg) {
  cfg.validate();
  const std::size_t len = tokens.size();
  if (len <= cfg.nta) return identity(tokens);

  const std::size_t head = cfg.head_budget();
  const std::size_t tail = cfg.tail_budget();
  const std::size_t fill = cfg.fill_budget();

  Residual residual(head, len - tail, len);
  if (fill > 0 && sitfl.empty() && residual.size() == 0) {
    throw Error(ErrorCode::kEmptySitfl, "no sITFL entries and nothing left to fill from");
  }

  // Residual positions of every token, ascending.
  std::unordered_map<std::string_view, std::vector<std::uint32_t>> positions;
  for (std::size_t i = head; i < len - tail; ++i) {
    positions[tokens[i]].push_back(static_cast<std::uint32_t>(i));
  }

  Truncation out;
  out.tokens.reserve(cfg.nta);
  out.tokens.insert(out.tokens.end(), tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(head));
  if (head > 0) out.segments.push_back(plain_segment(Segment::Kind::kHead, head));

  std::size_t middle = 0;
  std::vector<std::uint32_t> window;
  for (std::size_t rank = 0; rank < sitfl.entries.size() && middle < fill; ++rank) {
    const auto& token = sitfl.entries[rank].token;
    auto it = positions.find(token);
    if (it == positions.end()) continue;
    std::uint32_t anchor = kNone;
    for (auto p : it->second) {
      if (residual.alive(p)) {
        anchor = p;
        break;
      }
    }
    if (anchor == kNone) continue;

    window.clear();
    std::uint32_t cur = anchor;
    for (std::size_t i = 0; i < cfg.tn && residual.prev(cur) != kNone; ++i) {
      cur = residual.prev(cur);
      window.push_back(cur);
    }
    std::reverse(window.begin(), window.end());
    window.push_back(anchor);
    cur = anchor;
    for (std::size_t i = 0; i < cfg.tn && residual.next(cur) != kNone; ++i) {
      cur = residual.next(cur);
      window.push_back(cur);
    }
    const std::size_t take = std::min(window.size(), fill - middle);
    for (std::size_t i = 0; i < take; ++i) {
      out.tokens.push_back(tokens[window[i]]);
      residual.erase(window[i]);
    }
    middle += take;
    Segment seg = plain_segment(Segment::Kind::kGroup, take);
    seg.anchor = token;
    seg.rank = rank + 1;
    out.segments.push_back(std::move(seg));
  }

  if (middle < fill) {
    std::size_t pad = 0;
    for (auto p = residual.front(); p != kNone && middle < fill; p = residual.next(p)) {
      out.tokens.push_back(tokens[p]);
      ++middle;
      ++pad;
    }
    if (pad > 0) out.segments.push_back(plain_segment(Segment::Kind::kPad, pad));
  }

  out.tokens.insert(out.tokens.end(), tokens.end() - static_cast<std::ptrdiff_t>(tail), tokens.end());
  if (tail > 0) out.segments.push_back(plain_segment(Segment::Kind::kTail, tail));
  return out;
}

TokenSequence text_guide(std::span<const std::string> tokens, const Sitfl& sitfl,
                         const TruncationConfig& cfg) {
  return text_guide_traced(tokens, sitfl, cfg).tokens;
}

namespace {

bool takes_head_path(std::size_t len, const TruncationConfig& cfg) {
  const double factor = cfg.hybrid_factor.value_or(kDefaultHybridFactor);
  return static_cast<double>(len) <= factor * static_cast<double>(cfg.nta);
}

}  // namespace

TokenSequence text_guide_hybrid(std::span<const std::string> tokens, const Sitfl& sitfl,
                                const TruncationConfig& cfg) {
  return truncate(tokens, Strategy::kHybrid, &sitfl, cfg).tokens;
}

Truncation truncate(std::span<const std::string> tokens, Strategy strategy, const Sitfl* sitfl,
                    const TruncationConfig& cfg) {
  if (strategy_needs_sitfl(strategy) && sitfl == nullptr) {
    throw Error(ErrorCode::kMissingSitfl,
                "strategy '" + std::string(strategy_name(strategy)) + "' requires a sITFL");
  }
  switch (strategy) {
    case Strategy::kIdentity:
      return identity(tokens);
    case Strategy::kHead: {
      Truncation out;
      out.tokens = truncate_head(tokens, cfg.nta);
      out.segments.push_back(plain_segment(Segment::Kind::kHead, out.tokens.size()));
      return out;
    }
    case Strategy::kTail: {
      Truncation out;
      out.tokens = truncate_tail(tokens, cfg.nta);
      out.segments.push_back(plain_segment(Segment::Kind::kTail, out.tokens.size()));
      return out;
    }
    case Strategy::kHeadTail:
      return head_tail_traced(tokens, cfg.nta, cfg.part1, cfg.part2);
    case Strategy::kTextGuide:
      return text_guide_traced(tokens, *sitfl, cfg);
    case Strategy::kHybrid:
      cfg.validate();
      if (takes_head_path(tokens.size(), cfg)) return truncate(tokens, Strategy::kHead, sitfl, cfg);
      return text_guide_traced(tokens, *sitfl, cfg);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown strategy");
}

TruncatedCorpus apply_strategy(const Corpus& corpus, Strategy strategy, const Sitfl* sitfl,
                               const TruncationConfig& cfg, std::size_t jobs) {
  if (strategy_needs_sitfl(strategy) && sitfl == nullptr) {
    throw Error(ErrorCode::kMissingSitfl,
                "strategy '" + std::string(strategy_name(strategy)) + "' requires a sITFL");
  }
  std::vector<TextInstance> instances(corpus.size());
  std::vector<std::vector<Segment>> provenance(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t i) {
    const auto& src = corpus[i];
    auto result = truncate(tokenize(src.text), strategy, sitfl, cfg);
    instances[i] = TextInstance{src.id, detokenize(result.tokens), src.label};
    provenance[i] = std::move(result.segments);
  });
  // Instances whose tokens are all stripped detokenize to "", which a Corpus
  // rejects; keep the original text for those.
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].text.empty()) instances[i].text = corpus[i].text;
  }
  return TruncatedCorpus{Corpus(std::move(instances)), std::move(provenance)};
}

std::string format_provenance(const TruncatedCorpus& truncated, Strategy strategy) {
  std::string out;
  for (std::size_t i = 0; i < truncated.corpus.size(); ++i) {
    nlohmann::ordered_json obj;
    obj["id"] = truncated.corpus[i].id;
    obj["strategy"] = strategy_name(strategy);
    auto segments = nlohmann::ordered_json::array();
    for (const auto& seg : truncated.provenance[i]) {
      nlohmann::ordered_json s;
      s["kind"] = segment_kind_name(seg.kind);
      s["anchor"] = seg.anchor ? nlohmann::ordered_json(*seg.anchor) : nlohmann::ordered_json(nullptr);
      s["rank"] = seg.rank ? nlohmann::ordered_json(*seg.rank) : nlohmann::ordered_json(nullptr);
      s["len"] = seg.length;
      segments.push_back(std::move(s));
    }
    obj["segments"] = std::move(segments);
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace textguide
