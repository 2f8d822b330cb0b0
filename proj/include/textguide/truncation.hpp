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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textguide/corpus.hpp"
#include "textguide/importance.hpp"

namespace textguide {

inline constexpr std::size_t kDefaultNta = 510;
inline constexpr double kDefaultHybridFactor = 1.5;

struct TruncationConfig {
  std::size_t nta = kDefaultNta;
  double part1 = 0.2;
  double part2 = 0.1;
  // Token neighbours kept on each side of an important token.
  std::size_t tn = 2;
  std::optional<double> hybrid_factor;

  // nta >= 1, part1/part2 in [0, 1], part1 + part2 <= 1, hybrid_factor >= 1.
  void validate() const;

  std::size_t head_budget() const;
  std::size_t tail_budget() const;
  // Whatever head and tail leave over, so the three budgets sum to nta.
  std::size_t fill_budget() const;

  bool operator==(const TruncationConfig&) const = default;
};

// floor(fraction * nta) with a small tolerance so that e.g. 0.29 * 100 is 29.
std::size_t fraction_of(double fraction, std::size_t nta);

enum class Strategy { kIdentity, kHead, kTail, kHeadTail, kTextGuide, kHybrid };

Strategy parse_strategy(std::string_view name);
std::string_view strategy_name(Strategy strategy);
// Names accepted by parse_strategy, comma separated.
std::string strategy_names();
bool strategy_needs_sitfl(Strategy strategy);

struct Segment {
  enum class Kind { kHead, kGroup, kTail, kPad };

  Kind kind = Kind::kHead;
  // Set for groups only.
  std::optional<std::string> anchor;
  // 1-based sITFL rank of the anchor; set for groups only.
  std::optional<std::size_t> rank;
  std::size_t length = 0;

  bool operator==(const Segment&) const = default;
};

std::string_view segment_kind_name(Segment::Kind kind);

struct TokenGroup {
  std::vector<std::string> tokens;
  std::string anchor;
  std::size_t rank = 0;
};

struct Truncation {
  TokenSequence tokens;
  std::vector<Segment> segments;
};

TokenSequence truncate_head(std::span<const std::string> tokens, std::size_t nta);
TokenSequence truncate_tail(std::span<const std::string> tokens, std::size_t nta);

// floor(part1 * nta) leading tokens followed by the remaining trailing
// tokens. part1 + part2 must be 1 (InvalidSplit otherwise).
TokenSequence truncate_head_tail(std::span<const std::string> tokens, std::size_t nta,
                                 double part1, double part2);

// Guided truncation. Instances no longer than nta are returned unchanged.
// Otherwise the head and tail budgets are cut from the ends of a residual
// copy; the sITFL is then walked in rank order, and for each token found in
// the residual (first occurrence only) a window of up to tn residual tokens on
// either side is moved into the middle section. The walk stops when the fill
// budget is met (the last window is cut on the right to fit). Any budget left
// once the list runs out is padded from the front of the residual.
// Output: head ++ groups (in rank order) ++ pad ++ tail.
TokenSequence text_guide(std::span<const std::string> tokens, const Sitfl& sitfl,
                         const TruncationConfig& cfg);
Truncation text_guide_traced(std::span<const std::string> tokens, const Sitfl& sitfl,
                             const TruncationConfig& cfg);

// Head-only when len <= hybrid_factor * nta, text_guide otherwise.
TokenSequence text_guide_hybrid(std::span<const std::string> tokens, const Sitfl& sitfl,
                                const TruncationConfig& cfg);

// Dispatches on strategy and records the segments that make up the output.
// HeadTail reads its split from cfg.part1 / cfg.part2.
Truncation truncate(std::span<const std::string> tokens, Strategy strategy, const Sitfl* sitfl,
                    const TruncationConfig& cfg);

struct TruncatedCorpus {
  Corpus corpus;
  // Aligned with corpus.instances().
  std::vector<std::vector<Segment>> provenance;
};

// Truncates every instance (in parallel when jobs > 1; output order follows
// input order). Ids and labels are preserved; text is the detokenized result.
TruncatedCorpus apply_strategy(const Corpus& corpus, Strategy strategy, const Sitfl* sitfl,
                               const TruncationConfig& cfg, std::size_t jobs = 1);

// One JSON object per line: {"id", "strategy", "segments": [...]}.
std::string format_provenance(const TruncatedCorpus& truncated, Strategy strategy);

}  // namespace textguide
