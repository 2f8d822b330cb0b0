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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "textguide/corpus.hpp"

namespace textguide {

// Token -> contiguous feature index, in lexicographic token order.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(const Vocabulary& other);
  Vocabulary& operator=(const Vocabulary& other);
  Vocabulary(Vocabulary&&) noexcept = default;
  Vocabulary& operator=(Vocabulary&&) noexcept = default;

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::string& token(std::size_t index) const { return tokens_[index]; }
  std::size_t document_frequency(std::size_t index) const { return df_[index]; }
  std::size_t num_documents() const noexcept { return num_documents_; }
  std::optional<std::size_t> index_of(std::string_view token) const;
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  // Sub-vocabulary holding only `indices`, re-indexed in token order.
  Vocabulary restrict_to(std::span<const std::size_t> indices) const;

 private:
  friend Vocabulary build_vocabulary(std::span<const TokenSequence> docs, std::size_t min_df);

  std::vector<std::string> tokens_;
  std::vector<std::size_t> df_;
  // Keys view into tokens_.
  std::unordered_map<std::string_view, std::size_t> index_;
  std::size_t num_documents_ = 0;

  void rebuild_index();
};

// Keeps every token with document frequency >= min_df. Throws EmptyVocabulary
// when nothing survives.
Vocabulary build_vocabulary(std::span<const TokenSequence> docs, std::size_t min_df);
Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_df);

// Sparse counts sorted by feature index; stored counts are >= 1.
struct CountVector {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;

  std::uint32_t count(std::uint32_t feature) const;
  bool operator==(const CountVector&) const = default;
};

CountVector vectorize(std::span<const std::string> tokens, const Vocabulary& vocab);

// I(X;Y) in nats between token presence X and class Y, from empirical
// frequencies over `docs`.
double mutual_information(const Vocabulary& vocab, std::span<const TokenSequence> docs,
                          std::span<const std::string> labels, std::size_t feature);
double mutual_information(const Vocabulary& vocab, const Corpus& corpus, std::size_t feature);

// MI for every vocabulary entry in one pass over the documents.
std::vector<double> mutual_information_all(const Vocabulary& vocab,
                                           std::span<const TokenSequence> docs,
                                           std::span<const std::string> labels);

struct SelectedFeature {
  std::size_t index;
  std::string token;
  double mi;

  bool operator==(const SelectedFeature&) const = default;
};

// Non-increasing MI; equal scores ordered by token.
struct FeatureSet {
  std::vector<SelectedFeature> features;

  std::vector<std::size_t> indices() const;
};

FeatureSet select_features(const Vocabulary& vocab, std::span<const TokenSequence> docs,
                           std::span<const std::string> labels, std::size_t n);
FeatureSet select_features(const Vocabulary& vocab, const Corpus& corpus, std::size_t n);

// Tokenizes every instance of a corpus; labels aligned by position.
struct TokenizedCorpus {
  std::vector<TokenSequence> docs;
  std::vector<std::string> labels;

  static TokenizedCorpus from(const Corpus& corpus);
};

}  // namespace textguide
