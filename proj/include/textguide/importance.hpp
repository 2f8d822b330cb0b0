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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textguide/corpus.hpp"
#include "textguide/features.hpp"

namespace textguide {

struct BoostParams {
  std::size_t rounds = 100;
  double learning_rate = 0.1;
  std::size_t max_depth = 3;
  std::size_t min_samples_leaf = 5;
  std::uint64_t seed = 42;

  // learning_rate in (0, 1], 1 <= max_depth <= 6, min_samples_leaf >= 1.
  void validate() const;
  bool operator==(const BoostParams&) const = default;
};

inline constexpr std::size_t kMaxTreeDepth = 6;
inline constexpr double kHessianRegularizer = 1e-6;

struct TreeNode {
  // feature < 0 marks a leaf.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  double gain = 0.0;
  std::size_t samples = 0;

  bool is_leaf() const noexcept { return feature < 0; }
};

// Axis-aligned regression tree; a row goes left when count <= threshold.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double evaluate(const CountVector& x) const;
  std::size_t depth() const;
};

struct BoostModel {
  std::vector<std::string> classes;
  std::vector<std::string> feature_names;
  // trees[round][class]
  std::vector<std::vector<RegressionTree>> trees;
  std::vector<double> feature_gain;
  // Mean softmax cross-entropy on the training rows: entry 0 is the initial
  // (uniform) loss, entry r the loss after round r.
  std::vector<double> loss_trace;
  BoostParams params;
};

// Multiclass gradient boosting with a softmax cross-entropy objective. Each
// round fits one variance-reduction tree per class to (one-hot - softmax);
// leaves take the Newton step sum(g) / (sum(h) + 1e-6), scaled by the
// learning rate. Classes are the sorted distinct labels unless given.
BoostModel train_boost(std::span<const CountVector> rows, std::span<const std::string> labels,
                       std::vector<std::string> feature_names, const BoostParams& params);
BoostModel train_boost(std::span<const CountVector> rows, std::span<const std::string> labels,
                       std::vector<std::string> feature_names, const BoostParams& params,
                       std::vector<std::string> classes);

struct Prediction {
  std::string label;
  std::size_t class_index = 0;
  // Softmax probabilities in class order.
  std::vector<double> scores;
};

Prediction predict(const BoostModel& model, const CountVector& x);

// Cumulative split gain per feature name; unused features map to 0.
std::map<std::string, double> feature_importances(const BoostModel& model);

// --- sorted important token feature list -----------------------------------

struct SitflEntry {
  std::string token;
  double importance = 0.0;

  bool operator==(const SitflEntry&) const = default;
};

struct Sitfl {
  std::vector<SitflEntry> entries;
  std::size_t n = 0;
  std::string corpus_sha256;
  std::uint64_t seed = 0;

  bool operator==(const Sitfl&) const = default;
  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
};

enum class ImportanceBackend { kBoost, kMiRank };

ImportanceBackend parse_importance_backend(std::string_view name);
std::string_view importance_backend_name(ImportanceBackend backend);

struct SitflOptions {
  std::size_t n = 2000;
  std::size_t min_df = 2;
  BoostParams boost;
  ImportanceBackend backend = ImportanceBackend::kBoost;
};

// Vocabulary -> MI selection of n features -> boosting -> importances sorted
// non-increasing (ties by token). Rows are processed in id order so the list
// does not depend on corpus row order.
Sitfl build_sitfl(const Corpus& corpus, const SitflOptions& options);
Sitfl build_sitfl(const Corpus& corpus, std::size_t n, const BoostParams& params);

// Same pipeline over pre-tokenized documents, in the order given.
Sitfl build_sitfl(std::span<const TokenSequence> docs, std::span<const std::string> labels,
                  const SitflOptions& options, std::string corpus_digest);

// Canonical order: importance descending, token ascending.
void sort_sitfl_entries(std::vector<SitflEntry>& entries);

std::string format_sitfl(const Sitfl& sitfl);
Sitfl parse_sitfl(std::istream& in);
void write_sitfl(const Sitfl& sitfl, const std::filesystem::path& path);
Sitfl read_sitfl(const std::filesystem::path& path);

}  // namespace textguide
