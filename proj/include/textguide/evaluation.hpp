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
#include <vector>

#include "textguide/corpus.hpp"
#include "textguide/importance.hpp"
#include "textguide/truncation.hpp"

namespace textguide {

// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::uint64_t>> counts;

  std::uint64_t total() const;
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                          std::span<const std::string> classes);

// Multiclass (Gorodkin) MCC; 0 when either denominator factor vanishes.
double mcc(const ConfusionMatrix& m);

enum class LeakageMode { kFoldSafe, kCorpusLevel };

LeakageMode parse_leakage_mode(std::string_view name);
std::string_view leakage_mode_name(LeakageMode mode);

struct StrategySpec {
  Strategy strategy = Strategy::kTextGuide;
  TruncationConfig cfg;

  // e.g. "text_guide(nta=256,part1=0.2,part2=0.1,tn=2)".
  std::string describe() const;
};

struct EvalOptions {
  std::size_t k = 5;
  std::uint64_t seed = 42;
  BoostParams boost;
  LeakageMode leakage = LeakageMode::kFoldSafe;
  // Used both for the sITFL and for the proxy classifier's feature selection.
  std::size_t n_features = 2000;
  std::size_t min_df = 2;
  ImportanceBackend backend = ImportanceBackend::kBoost;
  std::size_t jobs = 1;
};

struct CVResult {
  std::string strategy;
  StrategySpec spec;
  LeakageMode leakage = LeakageMode::kFoldSafe;
  std::vector<double> fold_mcc;
  double mean_mcc = 0.0;
  std::vector<ConfusionMatrix> confusions;

  bool operator==(const CVResult& other) const;
};

// Stratified k-fold evaluation of one truncation strategy. Per fold: the
// sITFL (fold_safe) and the proxy classifier's vocabulary come from the
// training folds only; train and test texts are truncated; a BoW + boosting
// proxy is fit on the truncated training texts and scored by MCC on the
// held-out fold.
CVResult cross_validate(const Corpus& corpus, const StrategySpec& spec, const EvalOptions& options);

// One CVResult per strategy, all on the same folds.
std::vector<CVResult> compare_strategies(const Corpus& corpus, std::span<const StrategySpec> specs,
                                         const EvalOptions& options);

// The sITFLs cross-validation would use: one per fold in fold_safe mode, a
// single corpus-level list otherwise.
std::vector<Sitfl> fold_sitfls(const Corpus& corpus, const EvalOptions& options);

struct SweepGrid {
  std::vector<double> part1;
  std::vector<double> part2;
  std::vector<std::size_t> tn;

  // Part1 {0.1..0.5}, Part2 {0, 0.05, 0.1, 0.15}, TN {1..10}.
  static SweepGrid standard();
  std::size_t size() const { return part1.size() * part2.size() * tn.size(); }
};

struct SweepRow {
  double part1 = 0.0;
  double part2 = 0.0;
  std::size_t tn = 0;
  double mean_mcc = 0.0;
  std::vector<double> fold_mcc;
  // Set when this grid point failed; mean_mcc is then NaN.
  std::optional<std::string> error;

  bool operator==(const SweepRow&) const;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

// text_guide cross-validated at every (part1, part2, tn) of the grid. Rows are
// sorted by mean MCC descending, ties by (part1, part2, tn) ascending; failed
// points go last.
SweepResult sweep(const Corpus& corpus, const SweepGrid& grid, std::size_t nta,
                  const EvalOptions& options);

// Header part1,part2,tn,mean_mcc,fold_mccs; fold MCCs joined with ';'.
std::string format_sweep_csv(const SweepResult& result);

std::string format_cv_results_json(std::span<const CVResult> results);

}  // namespace textguide
