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

#include "textguide/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "textguide/error.hpp"

namespace textguide {

Vocabulary::Vocabulary(const Vocabulary& other)
    : tokens_(other.tokens_), df_(other.df_), num_documents_(other.num_documents_) {
  rebuild_index();
}

Vocabulary& Vocabulary::operator=(const Vocabulary& other) {
  if (this != &other) {
    tokens_ = other.tokens_;
    df_ = other.df_;
    num_documents_ = other.num_documents_;
    rebuild_index();
  }
  return *this;
}

void Vocabulary::rebuild_index() {
  index_.clear();
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary Vocabulary::restrict_to(std::span<const std::size_t> indices) const {
  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Vocabulary out;
  out.num_documents_ = num_documents_;
  out.tokens_.reserve(sorted.size());
  out.df_.reserve(sorted.size());
  for (std::size_t i : sorted) {
    out.tokens_.push_back(tokens_.at(i));
    out.df_.push_back(df_.at(i));
  }
  out.rebuild_index();
  return out;
}

Vocabulary build_vocabulary(std::span<const TokenSequence> docs, std::size_t min_df) {
  if (docs.empty()) {
    throw Error(ErrorCode::kEmptyVocabulary, "cannot build a vocabulary from an empty corpus");
  }
  std::map<std::string_view, std::size_t> df;
  std::vector<std::string_view> unique;
  for (const auto& doc : docs) {
    unique.assign(doc.begin(), doc.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (auto tok : unique) ++df[tok];
  }
  Vocabulary vocab;
  vocab.num_documents_ = docs.size();
  for (const auto& [tok, count] : df) {
    if (count >= min_df) {
      vocab.tokens_.emplace_back(tok);
      vocab.df_.push_back(count);
    }
  }
  if (vocab.tokens_.empty()) {
    throw Error(ErrorCode::kEmptyVocabulary,
                "no token reaches min_df=" + std::to_string(min_df) + " over " +
                    std::to_string(docs.size()) + " documents");
  }
  vocab.rebuild_index();
  return vocab;
}

TokenizedCorpus TokenizedCorpus::from(const Corpus& corpus) {
  TokenizedCorpus out;
  out.docs.reserve(corpus.size());
  out.labels.reserve(corpus.size());
  for (const auto& inst : corpus.instances()) {
    out.docs.push_back(tokenize(inst.text));
    out.labels.push_back(inst.label);
  }
  return out;
}

Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_df) {
  return build_vocabulary(TokenizedCorpus::from(corpus).docs, min_df);
}

std::uint32_t CountVector::count(std::uint32_t feature) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), feature,
                             [](const auto& e, std::uint32_t f) { return e.first < f; });
  return (it != entries.end() && it->first == feature) ? it->second : 0;
}

CountVector vectorize(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::vector<std::uint32_t> hits;
  hits.reserve(tokens.size());
  for (const auto& tok : tokens) {
    if (auto idx = vocab.index_of(tok)) hits.push_back(static_cast<std::uint32_t>(*idx));
  }
  std::sort(hits.begin(), hits.end());
  CountVector out;
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    out.entries.emplace_back(hits[i], static_cast<std::uint32_t>(j - i));
    i = j;
  }
  return out;
}

namespace {

struct PresenceTable {
  std::size_t num_classes = 0;
  std::vector<std::size_t> class_totals;
  // present[f * num_classes + c] = number of class-c documents containing f.
  std::vector<std::uint32_t> present;
};

PresenceTable presence_table(const Vocabulary& vocab, std::span<const TokenSequence> docs,
                             std::span<const std::string> labels) {
  if (docs.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "documents and labels differ in length");
  }
  std::map<std::string_view, std::size_t> class_index;
  for (const auto& l : labels) class_index.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [l, idx] : class_index) idx = next++;

  PresenceTable table;
  table.num_classes = class_index.size();
  table.class_totals.assign(table.num_classes, 0);
  table.present.assign(vocab.size() * table.num_classes, 0);
  std::vector<std::size_t> seen;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const std::size_t c = class_index.at(labels[d]);
    ++table.class_totals[c];
    seen.clear();
    for (const auto& tok : docs[d]) {
      if (auto idx = vocab.index_of(tok)) seen.push_back(*idx);
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (std::size_t f : seen) ++table.present[f * table.num_classes + c];
  }
  return table;
}

double mi_from_counts(const PresenceTable& t, std::size_t feature, std::size_t total) {
  if (total == 0) return 0.0;
  const double n = static_cast<double>(total);
  std::size_t with = 0;
  for (std::size_t c = 0; c < t.num_classes; ++c) with += t.present[feature * t.num_classes + c];
  const std::size_t without = total - with;
  double mi = 0.0;
  for (std::size_t c = 0; c < t.num_classes; ++c) {
    const std::size_t n_c = t.class_totals[c];
    const std::size_t n_1c = t.present[feature * t.num_classes + c];
    const std::size_t n_0c = n_c - n_1c;
    if (n_1c > 0) {
      mi += (n_1c / n) * std::log((n_1c * n) / (static_cast<double>(with) * n_c));
    }
    if (n_0c > 0) {
      mi += (n_0c / n) * std::log((n_0c * n) / (static_cast<double>(without) * n_c));
    }
  }
  // Rounding can leave a tiny negative value for independent variables.
  return std::max(mi, 0.0);
}

}  // namespace

std::vector<double> mutual_information_all(const Vocabulary& vocab,
                                           std::span<const TokenSequence> docs,
                                           std::span<const std::string> labels) {
  const auto table = presence_table(vocab, docs, labels);
  std::vector<double> out(vocab.size());
  for (std::size_t f = 0; f < vocab.size(); ++f) out[f] = mi_from_counts(table, f, docs.size());
  return out;
}

double mutual_information(const Vocabulary& vocab, std::span<const TokenSequence> docs,
                          std::span<const std::string> labels, std::size_t feature) {
  if (feature >= vocab.size()) {
    throw Error(ErrorCode::kInvalidArgument, "feature index out of range");
  }
  const auto sub = vocab.restrict_to(std::span<const std::size_t>(&feature, 1));
  const auto table = presence_table(sub, docs, labels);
  return mi_from_counts(table, 0, docs.size());
}

double mutual_information(const Vocabulary& vocab, const Corpus& corpus, std::size_t feature) {
  const auto tc = TokenizedCorpus::from(corpus);
  return mutual_information(vocab, tc.docs, tc.labels, feature);
}

std::vector<std::size_t> FeatureSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.index);
  return out;
}

FeatureSet select_features(const Vocabulary& vocab, std::span<const TokenSequence> docs,
                           std::span<const std::string> labels, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "feature count must be >= 1");
  const auto scores = mutual_information_all(vocab, docs, labels);
  std::vector<std::size_t> order(vocab.size());
  std::iota(order.begin(), order.end(), 0);
  // Vocabulary indices follow token order, so index order is the tie-break.
  auto by_score = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  const std::size_t take = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    by_score);
  FeatureSet out;
  out.features.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.features.push_back({order[i], vocab.token(order[i]), scores[order[i]]});
  }
  return out;
}

FeatureSet select_features(const Vocabulary& vocab, const Corpus& corpus, std::size_t n) {
  const auto tc = TokenizedCorpus::from(corpus);
  return select_features(vocab, tc.docs, tc.labels, n);
}

}  // namespace textguide
