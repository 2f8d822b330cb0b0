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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "textguide/error.hpp"
#include "textguide/evaluation.hpp"

using namespace textguide;

namespace {

ConfusionMatrix matrix(std::vector<std::vector<std::uint64_t>> counts) {
  ConfusionMatrix m;
  for (std::size_t i = 0; i < counts.size(); ++i) m.classes.push_back("c" + std::to_string(i));
  m.counts = std::move(counts);
  return m;
}

EvalOptions quick_options() {
  EvalOptions o;
  o.k = 3;
  o.boost.rounds = 10;
  o.n_features = 50;
  o.min_df = 1;
  return o;
}

Corpus small_signal_corpus(std::uint64_t seed) {
  testing::MidSignalSpec spec;
  spec.instances = 60;
  spec.classes = 3;
  spec.length = 80;
  spec.min_position = 20;
  spec.filler_vocab = 200;
  spec.planted = 3;
  spec.seed = seed;
  return testing::mid_signal_corpus(spec);
}

}  // namespace

TEST_CASE("multiclass MCC equals the binary closed form on every small 2x2 matrix") {
  for (std::uint64_t a = 0; a <= 4; ++a)
    for (std::uint64_t b = 0; b <= 4; ++b)
      for (std::uint64_t c = 0; c <= 4; ++c)
        for (std::uint64_t d = 0; d <= 4; ++d) {
          // Rows are truth: [[tp, fn], [fp, tn]].
          const double got = mcc(matrix({{a, b}, {c, d}}));
          const double want = oracle::binary_mcc(a, b, c, d);
          CHECK(std::abs(got - want) <= 1e-12);
        }
}

TEST_CASE("MCC is bounded and invariant to class permutation") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng() % 4;
    std::vector<std::vector<std::uint64_t>> counts(k, std::vector<std::uint64_t>(k));
    for (auto& row : counts)
      for (auto& x : row) x = rng() % 10;
    const double base = mcc(matrix(counts));
    CHECK(base >= -1.0 - 1e-12);
    CHECK(base <= 1.0 + 1e-12);

    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<std::uint64_t>> permuted(k, std::vector<std::uint64_t>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) permuted[perm[i]][perm[j]] = counts[i][j];
    CHECK(std::abs(mcc(matrix(permuted)) - base) <= 1e-12);
  }
}

TEST_CASE("MCC edge cases") {
  CHECK(mcc(matrix({{3, 0, 0}, {0, 5, 0}, {0, 0, 2}})) == 1.0);
  CHECK(mcc(matrix({{3, 0}, {4, 0}})) == 0.0);
  CHECK(mcc(matrix({{0, 0}, {0, 0}})) == 0.0);
  CHECK(mcc(matrix({{0, 2}, {2, 0}})) == doctest::Approx(-1.0));
}

TEST_CASE("confusion tallies rows as truth and columns as predictions") {
  const std::vector<std::string> classes{"a", "b"};
  const std::vector<std::string> truth{"a", "a", "b", "b", "b"};
  const std::vector<std::string> pred{"a", "b", "b", "b", "a"};
  const auto m = confusion(truth, pred, classes);
  CHECK(m.counts == std::vector<std::vector<std::uint64_t>>{{1, 1}, {1, 2}});
  CHECK(m.total() == 5);
  const std::vector<std::string> bad{"a", "a", "b", "b", "zzz"};
  try {
    confusion(truth, bad, classes);
    FAIL("expected UnknownLabel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownLabel);
  }
}

TEST_CASE("leakage mode names") {
  CHECK(parse_leakage_mode("fold_safe") == LeakageMode::kFoldSafe);
  CHECK(parse_leakage_mode("corpus_level") == LeakageMode::kCorpusLevel);
  CHECK(leakage_mode_name(LeakageMode::kCorpusLevel) == "corpus_level");
  CHECK_THROWS_AS(parse_leakage_mode("leaky"), Error);
}

TEST_CASE("cross_validate is deterministic and independent of jobs") {
  const auto corpus = small_signal_corpus(3);
  StrategySpec spec;
  spec.cfg.nta = 30;
  auto options = quick_options();
  const auto a = cross_validate(corpus, spec, options);
  options.jobs = 4;
  const auto b = cross_validate(corpus, spec, options);
  CHECK(a == b);
  REQUIRE(a.fold_mcc.size() == 3);
  CHECK(a.confusions.size() == 3);
  std::uint64_t total = 0;
  for (const auto& m : a.confusions) total += m.total();
  CHECK(total == corpus.size());
  const double mean = std::accumulate(a.fold_mcc.begin(), a.fold_mcc.end(), 0.0) / 3.0;
  CHECK(a.mean_mcc == doctest::Approx(mean).epsilon(1e-15));
  CHECK(a.strategy == "text_guide(nta=30,part1=0.2,part2=0.1,tn=2)");
}

TEST_CASE("identity and head agree when every instance already fits") {
  std::mt19937_64 rng(9);
  const auto corpus = testing::random_corpus(rng, 45, 3, 10, 30);
  auto options = quick_options();
  StrategySpec identity{Strategy::kIdentity, {}};
  StrategySpec head{Strategy::kHead, {}};
  identity.cfg.nta = 64;
  head.cfg.nta = 64;
  const std::vector<StrategySpec> specs{identity, head, head};
  const auto results = compare_strategies(corpus, specs, options);
  REQUIRE(results.size() == 3);
  CHECK(results[0].fold_mcc == results[1].fold_mcc);
  CHECK(results[1] == results[2]);
}

TEST_CASE("compare_strategies matches individual cross_validate calls") {
  const auto corpus = small_signal_corpus(4);
  const auto options = quick_options();
  StrategySpec tg;
  tg.cfg.nta = 30;
  StrategySpec head{Strategy::kHead, tg.cfg};
  const std::vector<StrategySpec> specs{tg, head};
  const auto results = compare_strategies(corpus, specs, options);
  CHECK(results[0] == cross_validate(corpus, tg, options));
  CHECK(results[1] == cross_validate(corpus, head, options));
}

TEST_CASE("fold_safe sITFLs never see test-fold tokens") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    auto rows = small_signal_corpus(100 + trial).instances();
    auto options = quick_options();
    options.seed = rng();
    const auto folds = stratified_folds(Corpus(rows), options.k, options.seed);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].text += " sentinel" + std::to_string(folds.folds[i]);
    }
    const Corpus poisoned(rows);
    const auto lists = fold_sitfls(poisoned, options);
    REQUIRE(lists.size() == options.k);
    for (std::size_t f = 0; f < lists.size(); ++f) {
      for (const auto& e : lists[f].entries) CHECK(e.token != "sentinel" + std::to_string(f));
    }
    options.leakage = LeakageMode::kCorpusLevel;
    CHECK(fold_sitfls(poisoned, options).size() == 1);
  }
}

TEST_CASE("sweep covers the grid and sorts by mean MCC") {
  const auto corpus = small_signal_corpus(5);
  const auto options = quick_options();
  SweepGrid grid{{0.1, 0.3}, {0.0, 0.1}, {1, 3}};
  const auto result = sweep(corpus, grid, 30, options);
  REQUIRE(result.rows.size() == grid.size());
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    CHECK(result.rows[i - 1].mean_mcc >= result.rows[i].mean_mcc);
  }
  const auto csv = format_sweep_csv(result);
  CHECK(csv.substr(0, csv.find('\n')) == "part1,part2,tn,mean_mcc,fold_mccs");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(grid.size() + 1));
  CHECK(format_sweep_csv(sweep(corpus, grid, 30, options)) == csv);

  SweepGrid single{{0.2}, {0.1}, {2}};
  const auto one = sweep(corpus, single, 30, options);
  REQUIRE(one.rows.size() == 1);
  StrategySpec spec;
  spec.cfg.nta = 30;
  const auto cv = cross_validate(corpus, spec, options);
  CHECK(one.rows[0].fold_mcc == cv.fold_mcc);
  CHECK(one.rows[0].mean_mcc == cv.mean_mcc);
}

TEST_CASE("sweep records failing grid points instead of dropping them") {
  const auto corpus = small_signal_corpus(6);
  SweepGrid grid{{0.2, 0.95}, {0.1}, {1}};
  const auto result = sweep(corpus, grid, 30, quick_options());
  REQUIRE(result.rows.size() == 2);
  CHECK(!result.rows[0].error);
  REQUIRE(result.rows[1].error);
  CHECK(std::isnan(result.rows[1].mean_mcc));
  CHECK(result.rows[1].part1 == 0.95);
}

TEST_CASE("standard grid has 200 points") {
  const auto g = SweepGrid::standard();
  CHECK(g.size() == 200);
  CHECK(g.part1 == std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5});
  CHECK(g.part2 == std::vector<double>{0.0, 0.05, 0.1, 0.15});
  CHECK(g.tn.front() == 1);
  CHECK(g.tn.back() == 10);
}

TEST_CASE("CV results JSON carries the confusion matrices") {
  const auto corpus = small_signal_corpus(7);
  StrategySpec spec{Strategy::kHead, {}};
  spec.cfg.nta = 30;
  const std::vector<CVResult> results{cross_validate(corpus, spec, quick_options())};
  const auto j = nlohmann::json::parse(format_cv_results_json(results));
  REQUIRE(j.is_array());
  CHECK(j[0]["strategy"] == "head(nta=30)");
  CHECK(j[0]["fold_mcc"].size() == 3);
  CHECK(j[0]["confusion_matrices"].size() == 3);
}
