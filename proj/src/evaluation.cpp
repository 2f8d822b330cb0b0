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

#include "textguide/evaluation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "textguide/error.hpp"
#include "textguide/features.hpp"
#include "textguide/io.hpp"
#include "textguide/parallel.hpp"

namespace textguide {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts) sum = std::accumulate(row.begin(), row.end(), sum);
  return sum;
}

ConfusionMatrix confusion(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                          std::span<const std::string> classes) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::kInvalidArgument, "y_true and y_pred differ in length");
  }
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < classes.size(); ++i) index.emplace(classes[i], i);
  auto lookup = [&](const std::string& label) {
    auto it = index.find(label);
    if (it == index.end()) throw Error(ErrorCode::kUnknownLabel, "label '" + label + "'");
    return it->second;
  };
  ConfusionMatrix m;
  m.classes.assign(classes.begin(), classes.end());
  m.counts.assign(classes.size(), std::vector<std::uint64_t>(classes.size(), 0));
  for (std::size_t i = 0; i < y_true.size(); ++i) ++m.counts[lookup(y_true[i])][lookup(y_pred[i])];
  return m;
}

double mcc(const ConfusionMatrix& m) {
  const std::size_t k = m.counts.size();
  std::vector<double> t(k, 0.0), p(k, 0.0);
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto v = static_cast<double>(m.counts[i][j]);
      t[i] += v;
      p[j] += v;
      s += v;
    }
    c += static_cast<double>(m.counts[i][i]);
  }
  double pt = 0.0, pp = 0.0, tt = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    pt += p[i] * t[i];
    pp += p[i] * p[i];
    tt += t[i] * t[i];
  }
  const double a = s * s - pp;
  const double b = s * s - tt;
  if (a <= 0.0 || b <= 0.0) return 0.0;
  const double value = (c * s - pt) / std::sqrt(a * b);
  return std::clamp(value, -1.0, 1.0);
}

LeakageMode parse_leakage_mode(std::string_view name) {
  if (name == "fold_safe") return LeakageMode::kFoldSafe;
  if (name == "corpus_level") return LeakageMode::kCorpusLevel;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown leakage mode '" + std::string(name) + "' (expected fold_safe|corpus_level)");
}

std::string_view leakage_mode_name(LeakageMode mode) {
  return mode == LeakageMode::kCorpusLevel ? "corpus_level" : "fold_safe";
}

std::string StrategySpec::describe() const {
  std::string out(strategy_name(strategy));
  out += "(nta=" + std::to_string(cfg.nta);
  switch (strategy) {
    case Strategy::kHeadTail:
      out += ",part1=" + format_double(cfg.part1) + ",part2=" + format_double(cfg.part2);
      break;
    case Strategy::kHybrid:
      out += ",hybrid_factor=" + format_double(cfg.hybrid_factor.value_or(kDefaultHybridFactor));
      [[fallthrough]];
    case Strategy::kTextGuide:
      out += ",part1=" + format_double(cfg.part1) + ",part2=" + format_double(cfg.part2) +
             ",tn=" + std::to_string(cfg.tn);
      break;
    default:
      break;
  }
  out += ")";
  return out;
}

bool CVResult::operator==(const CVResult& other) const {
  return strategy == other.strategy && spec.strategy == other.spec.strategy &&
         spec.cfg == other.spec.cfg && leakage == other.leakage && fold_mcc == other.fold_mcc &&
         mean_mcc == other.mean_mcc && confusions == other.confusions;
}

bool SweepRow::operator==(const SweepRow& other) const {
  const bool mean_equal =
      (std::isnan(mean_mcc) && std::isnan(other.mean_mcc)) || mean_mcc == other.mean_mcc;
  return part1 == other.part1 && part2 == other.part2 && tn == other.tn && mean_equal &&
         fold_mcc == other.fold_mcc && error == other.error;
}

namespace {

// Tokenized corpus plus fold membership, shared by every strategy evaluated
// against it so comparisons are paired.
struct FoldPlan {
  std::vector<TokenSequence> docs;
  std::vector<std::string> labels;
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> train;
  std::vector<std::vector<std::size_t>> test;
  // One per fold in fold_safe mode, one in total in corpus_level mode.
  std::vector<Sitfl> sitfls;
  LeakageMode leakage = LeakageMode::kFoldSafe;

  const Sitfl& sitfl_for(std::size_t fold) const {
    return leakage == LeakageMode::kFoldSafe ? sitfls[fold] : sitfls.front();
  }
};

SitflOptions sitfl_options(const EvalOptions& options) {
  SitflOptions out;
  out.n = options.n_features;
  out.min_df = options.min_df;
  out.boost = options.boost;
  out.backend = options.backend;
  return out;
}

FoldPlan make_plan(const Corpus& corpus, const EvalOptions& options, bool need_sitfl) {
  if (corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot evaluate an empty corpus");
  FoldPlan plan;
  plan.leakage = options.leakage;
  plan.classes = corpus.labels();
  const auto tc = TokenizedCorpus::from(corpus);
  plan.docs = tc.docs;
  plan.labels = tc.labels;
  const auto folds = stratified_folds(corpus, options.k, options.seed);
  plan.train.resize(options.k);
  plan.test.resize(options.k);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t f = 0; f < options.k; ++f) {
      (folds.folds[i] == f ? plan.test[f] : plan.train[f]).push_back(i);
    }
  }
  if (!need_sitfl) return plan;

  const auto sopts = sitfl_options(options);
  if (options.leakage == LeakageMode::kCorpusLevel) {
    plan.sitfls.push_back(build_sitfl(corpus, sopts));
    return plan;
  }
  plan.sitfls.resize(options.k);
  parallel_for(options.k, options.jobs, [&](std::size_t f) {
    std::vector<TokenSequence> docs;
    std::vector<std::string> labels;
    for (auto i : plan.train[f]) {
      docs.push_back(plan.docs[i]);
      labels.push_back(plan.labels[i]);
    }
    try {
      plan.sitfls[f] = build_sitfl(docs, labels, sopts, corpus_sha256(corpus));
    } catch (const Error& e) {
      Error::rethrow_with_context(e, "fold " + std::to_string(f) + " sITFL");
    }
  });
  return plan;
}

ConfusionMatrix evaluate_fold(const FoldPlan& plan, std::size_t fold, const StrategySpec& spec,
                              const EvalOptions& options, std::uint64_t boost_seed) {
  const Sitfl* sitfl = strategy_needs_sitfl(spec.strategy) ? &plan.sitfl_for(fold) : nullptr;
  auto cut = [&](std::size_t i) { return truncate(plan.docs[i], spec.strategy, sitfl, spec.cfg).tokens; };

  std::vector<TokenSequence> train_docs;
  std::vector<std::string> train_labels;
  train_docs.reserve(plan.train[fold].size());
  for (auto i : plan.train[fold]) {
    train_docs.push_back(cut(i));
    train_labels.push_back(plan.labels[i]);
  }
  const auto vocab = build_vocabulary(train_docs, options.min_df);
  const auto selected = select_features(vocab, train_docs, train_labels, options.n_features);
  const auto features = vocab.restrict_to(selected.indices());
  std::vector<CountVector> rows;
  rows.reserve(train_docs.size());
  for (const auto& d : train_docs) rows.push_back(vectorize(d, features));

  BoostParams boost = options.boost;
  boost.seed = boost_seed;
  const auto model = train_boost(rows, train_labels, features.tokens(), boost, plan.classes);

  std::vector<std::string> truth, predicted;
  for (auto i : plan.test[fold]) {
    truth.push_back(plan.labels[i]);
    predicted.push_back(predict(model, vectorize(cut(i), features)).label);
  }
  return confusion(truth, predicted, plan.classes);
}

std::uint64_t point_seed(std::uint64_t base, const StrategySpec& spec, std::size_t fold) {
  std::uint64_t h = mix_seed(base, static_cast<std::uint64_t>(spec.strategy));
  h = mix_seed(h, std::bit_cast<std::uint64_t>(spec.cfg.part1));
  h = mix_seed(h, std::bit_cast<std::uint64_t>(spec.cfg.part2));
  h = mix_seed(h, spec.cfg.tn);
  return mix_seed(h, fold);
}

CVResult assemble(const StrategySpec& spec, LeakageMode leakage, std::vector<ConfusionMatrix> folds) {
  CVResult out;
  out.strategy = spec.describe();
  out.spec = spec;
  out.leakage = leakage;
  out.confusions = std::move(folds);
  for (const auto& m : out.confusions) out.fold_mcc.push_back(mcc(m));
  out.mean_mcc = out.fold_mcc.empty()
                     ? 0.0
                     : std::accumulate(out.fold_mcc.begin(), out.fold_mcc.end(), 0.0) /
                           static_cast<double>(out.fold_mcc.size());
  return out;
}

void check_options(const EvalOptions& options) {
  if (options.k < 2) throw Error(ErrorCode::kInvalidArgument, "fold count must be >= 2");
  options.boost.validate();
}

}  // namespace

std::vector<Sitfl> fold_sitfls(const Corpus& corpus, const EvalOptions& options) {
  check_options(options);
  return make_plan(corpus, options, true).sitfls;
}

std::vector<CVResult> compare_strategies(const Corpus& corpus, std::span<const StrategySpec> specs,
                                         const EvalOptions& options) {
  check_options(options);
  for (const auto& s : specs) s.cfg.validate();
  const bool need_sitfl = std::any_of(specs.begin(), specs.end(), [](const StrategySpec& s) {
    return strategy_needs_sitfl(s.strategy);
  });
  const FoldPlan plan = make_plan(corpus, options, need_sitfl);

  const std::size_t k = options.k;
  std::vector<std::vector<ConfusionMatrix>> matrices(specs.size(), std::vector<ConfusionMatrix>(k));
  parallel_for(specs.size() * k, options.jobs, [&](std::size_t task) {
    const std::size_t s = task / k;
    const std::size_t f = task % k;
    try {
      matrices[s][f] = evaluate_fold(plan, f, specs[s], options, point_seed(options.seed, specs[s], f));
    } catch (const Error& e) {
      Error::rethrow_with_context(e, specs[s].describe() + " fold " + std::to_string(f));
    }
  });
  std::vector<CVResult> out;
  out.reserve(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    out.push_back(assemble(specs[s], options.leakage, std::move(matrices[s])));
  }
  return out;
}

CVResult cross_validate(const Corpus& corpus, const StrategySpec& spec, const EvalOptions& options) {
  return compare_strategies(corpus, std::span<const StrategySpec>(&spec, 1), options).front();
}

SweepGrid SweepGrid::standard() {
  SweepGrid g;
  g.part1 = {0.1, 0.2, 0.3, 0.4, 0.5};
  g.part2 = {0.0, 0.05, 0.1, 0.15};
  for (std::size_t tn = 1; tn <= 10; ++tn) g.tn.push_back(tn);
  return g;
}

SweepResult sweep(const Corpus& corpus, const SweepGrid& grid, std::size_t nta,
                  const EvalOptions& options) {
  check_options(options);
  if (grid.size() == 0) throw Error(ErrorCode::kInvalidArgument, "sweep grid is empty");
  const FoldPlan plan = make_plan(corpus, options, true);

  std::vector<StrategySpec> points;
  for (double p1 : grid.part1) {
    for (double p2 : grid.part2) {
      for (std::size_t tn : grid.tn) {
        StrategySpec spec;
        spec.strategy = Strategy::kTextGuide;
        spec.cfg.nta = nta;
        spec.cfg.part1 = p1;
        spec.cfg.part2 = p2;
        spec.cfg.tn = tn;
        points.push_back(spec);
      }
    }
  }

  const std::size_t k = options.k;
  std::vector<std::vector<ConfusionMatrix>> matrices(points.size(), std::vector<ConfusionMatrix>(k));
  std::vector<std::optional<std::string>> errors(points.size() * k);
  parallel_for(points.size() * k, options.jobs, [&](std::size_t task) {
    const std::size_t p = task / k;
    const std::size_t f = task % k;
    try {
      points[p].cfg.validate();
      matrices[p][f] = evaluate_fold(plan, f, points[p], options, point_seed(options.seed, points[p], f));
    } catch (const std::exception& e) {
      errors[task] = "fold " + std::to_string(f) + ": " + e.what();
    }
  });

  SweepResult result;
  for (std::size_t p = 0; p < points.size(); ++p) {
    SweepRow row;
    row.part1 = points[p].cfg.part1;
    row.part2 = points[p].cfg.part2;
    row.tn = points[p].cfg.tn;
    for (std::size_t f = 0; f < k && !row.error; ++f) row.error = errors[p * k + f];
    if (row.error) {
      row.mean_mcc = std::numeric_limits<double>::quiet_NaN();
    } else {
      const auto cv = assemble(points[p], options.leakage, std::move(matrices[p]));
      row.mean_mcc = cv.mean_mcc;
      row.fold_mcc = cv.fold_mcc;
    }
    result.rows.push_back(std::move(row));
  }
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.error.has_value() != b.error.has_value()) return !a.error.has_value();
    if (!a.error && a.mean_mcc != b.mean_mcc) return a.mean_mcc > b.mean_mcc;
    if (a.part1 != b.part1) return a.part1 < b.part1;
    if (a.part2 != b.part2) return a.part2 < b.part2;
    return a.tn < b.tn;
  });
  return result;
}

std::string format_sweep_csv(const SweepResult& result) {
  std::string out = "part1,part2,tn,mean_mcc,fold_mccs\n";
  for (const auto& row : result.rows) {
    out += format_double(row.part1) + "," + format_double(row.part2) + "," + std::to_string(row.tn) + ",";
    if (row.error) {
      std::string msg = *row.error;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out += "NaN,\"ERROR: " + msg + "\"\n";
      continue;
    }
    out += format_double(row.mean_mcc) + ",";
    for (std::size_t i = 0; i < row.fold_mcc.size(); ++i) {
      if (i > 0) out += ';';
      out += format_double(row.fold_mcc[i]);
    }
    out += '\n';
  }
  return out;
}

std::string format_cv_results_json(std::span<const CVResult> results) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json obj;
    obj["strategy"] = r.strategy;
    obj["leakage"] = leakage_mode_name(r.leakage);
    obj["nta"] = r.spec.cfg.nta;
    obj["part1"] = r.spec.cfg.part1;
    obj["part2"] = r.spec.cfg.part2;
    obj["tn"] = r.spec.cfg.tn;
    obj["mean_mcc"] = r.mean_mcc;
    obj["fold_mcc"] = r.fold_mcc;
    auto mats = nlohmann::ordered_json::array();
    for (const auto& m : r.confusions) {
      nlohmann::ordered_json jm;
      jm["classes"] = m.classes;
      jm["counts"] = m.counts;
      mats.push_back(std::move(jm));
    }
    obj["confusion_matrices"] = std::move(mats);
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

}  // namespace textguide
