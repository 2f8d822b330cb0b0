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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace textguide {

struct TextInstance {
  std::string id;
  std::string text;
  std::string label;

  bool operator==(const TextInstance&) const = default;
};

// Tokens are non-empty, lowercase, and begin and end with an alphanumeric
// code point.
using TokenSequence = std::vector<std::string>;

// A labeled collection with unique ids. `labels()` is the sorted set of
// distinct labels, so class order does not depend on row order.
class Corpus {
 public:
  Corpus() = default;

  // Validates id uniqueness and non-empty text. Throws DuplicateId or EmptyText
  // (with the offending row number) on violation.
  explicit Corpus(std::vector<TextInstance> instances);

  const std::vector<TextInstance>& instances() const noexcept { return instances_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return instances_.size(); }
  bool empty() const noexcept { return instances_.empty(); }
  const TextInstance& operator[](std::size_t i) const { return instances_[i]; }

  bool operator==(const Corpus&) const = default;

 private:
  std::vector<TextInstance> instances_;
  std::vector<std::string> labels_;
};

enum class CorpusFormat { kJsonl, kCsv };

CorpusFormat parse_corpus_format(std::string_view name);
std::string_view corpus_format_name(CorpusFormat format);
// Picks the format from a path's extension; `.csv` is CSV, anything else JSONL.
CorpusFormat corpus_format_for(const std::filesystem::path& path);

// Lowercase, split on Unicode White_Space, strip leading and trailing
// non-alphanumeric code points from each piece, drop empties. Invalid UTF-8
// bytes decode as U+FFFD.
TokenSequence tokenize(std::string_view text);

std::string detokenize(std::span<const std::string> tokens);

Corpus parse_corpus(std::istream& in, CorpusFormat format);
std::string format_corpus(const Corpus& corpus, CorpusFormat format);

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format);

// Order-independent digest: instances are hashed sorted by id.
std::string corpus_sha256(const Corpus& corpus);

struct FoldAssignment {
  std::size_t k = 0;
  // Fold index per instance, aligned with Corpus::instances().
  std::vector<std::size_t> folds;
  std::unordered_map<std::string, std::size_t> by_id;
  // ClassTooSmall notices for classes with fewer than k members.
  std::vector<std::string> warnings;

  std::size_t fold_of(const std::string& id) const { return by_id.at(id); }
};

// Per-class seeded shuffle (members ordered by id first), then round-robin.
// The round-robin cursor carries over between classes so overall fold sizes
// also stay within one of each other.
FoldAssignment stratified_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed);

// Deterministic Fisher-Yates over a 64-bit Mersenne Twister. Independent of
// the standard library's distribution implementations.
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed);

}  // namespace textguide

#include <limits>
#include <random>

namespace textguide {

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    // Rejection sampling keeps the draw unbiased and portable.
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r = gen();
    while (r >= limit) r = gen();
    std::swap(items[i - 1], items[static_cast<std::size_t>(r % bound)]);
  }
}

}  // namespace textguide
