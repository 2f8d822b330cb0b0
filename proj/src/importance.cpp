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

#include "textguide/importance.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "textguide/error.hpp"
#include "textguide/io.hpp"

namespace textguide {

void BoostParams::validate() const {
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be in (0, 1]");
  }
  if (max_depth < 1 || max_depth > kMaxTreeDepth) {
    throw Error(ErrorCode::kInvalidArgument,
                "max_depth must be in [1, " + std::to_string(kMaxTreeDepth) + "]");
  }
  if (min_samples_leaf < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_samples_leaf must be >= 1");
  }
}

double RegressionTree::evaluate(const CountVector& x) const {
  if (nodes.empty()) return 0.0;
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    const double v = x.count(static_cast<std::uint32_t>(n.feature));
    i = static_cast<std::size_t>(v <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

std::size_t RegressionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes[i].right), d + 1);
    }
  }
  return deepest;
}

namespace {

constexpr double kMinSplitGain = 1e-12;

// Each distinct (feature, count) pair seen in training is a bin. Bins are
// numbered by feature, then ascending count; every row lists its bins.
struct Design {
  std::vector<std::uint32_t> feature_begin;  // bins of feature f: [begin[f], begin[f+1])
  std::vector<double> bin_value;
  std::vector<std::uint32_t> row_begin;
  std::vector<std::uint32_t> row_bins;
};

Design make_design(std::span<const CountVector> rows, std::size_t num_features) {
  std::vector<std::vector<std::uint32_t>> values(num_features);
  for (const auto& row : rows) {
    for (const auto& [f, c] : row.entries) {
      if (f >= num_features) {
        throw Error(ErrorCode::kInvalidArgument,
                    "feature index " + std::to_string(f) + " outside the feature space");
      }
      values[f].push_back(c);
    }
  }
  Design d;
  d.feature_begin.push_back(0);
  for (auto& v : values) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    d.bin_value.insert(d.bin_value.end(), v.begin(), v.end());
    d.feature_begin.push_back(static_cast<std::uint32_t>(d.bin_value.size()));
  }
  d.row_begin.push_back(0);
  for (const auto& row : rows) {
    for (const auto& [f, c] : row.entries) {
      const auto& v = values[f];
      const auto pos = std::lower_bound(v.begin(), v.end(), c) - v.begin();
      d.row_bins.push_back(d.feature_begin[f] + static_cast<std::uint32_t>(pos));
    }
    d.row_begin.push_back(static_cast<std::uint32_t>(d.row_bins.size()));
  }
  return d;
}

struct Histogram {
  std::vector<double> sum;
  std::vector<std::uint32_t> count;
};

struct NodeStats {
  double sum_grad = 0.0;
  double sum_hess = 0.0;
  std::size_t count = 0;
};

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

double split_score(double sum, std::size_t n) { return n == 0 ? 0.0 : sum * sum / static_cast<double>(n); }

void fill_histogram(const Design& d, std::span<const std::uint32_t> node_rows, std::span<const double> grad,
                    Histogram& h) {
  h.sum.assign(d.bin_value.size(), 0.0);
  h.count.assign(d.bin_value.size(), 0);
  for (auto r : node_rows) {
    const double g = grad[r];
    for (auto i = d.row_begin[r]; i < d.row_begin[r + 1]; ++i) {
      const auto bin = d.row_bins[i];
      h.sum[bin] += g;
      ++h.count[bin];
    }
  }
}

// Best cut of one node. Rows without a feature have count 0 and sit left of
// every threshold; thresholds are midpoints between adjacent counts present.
SplitCandidate best_split(const Design& d, const Histogram& h, const NodeStats& node, std::size_t min_leaf) {
  SplitCandidate best;
  const double s = node.sum_grad;
  const double base = split_score(s, node.count);
  const std::size_t n_features = d.feature_begin.size() - 1;
  for (std::size_t f = 0; f < n_features; ++f) {
    const auto b = d.feature_begin[f];
    const auto e = d.feature_begin[f + 1];
    std::size_t nz_cnt = 0;
    double nz_sum = 0.0;
    for (auto j = b; j < e; ++j) {
      nz_cnt += h.count[j];
      nz_sum += h.sum[j];
    }
    if (nz_cnt == 0) continue;
    const std::size_t zero_cnt = node.count - nz_cnt;
    std::size_t acc_cnt = zero_cnt;
    double acc_sum = zero_cnt == 0 ? 0.0 : s - nz_sum;
    bool has_last = zero_cnt > 0;
    double last = 0.0;
    for (auto j = b; j < e; ++j) {
      if (h.count[j] == 0) continue;
      const double value = d.bin_value[j];
      if (has_last) {
        const std::size_t n_right = node.count - acc_cnt;
        if (acc_cnt >= min_leaf && n_right >= min_leaf) {
          const double gain = split_score(acc_sum, acc_cnt) + split_score(s - acc_sum, n_right) - base;
          if (gain > best.gain) best = {gain, static_cast<int>(f), 0.5 * (last + value)};
        }
      }
      acc_sum += h.sum[j];
      acc_cnt += h.count[j];
      last = value;
      has_last = true;
    }
  }
  return best;
}

NodeStats node_stats(std::span<const std::uint32_t> node_rows, std::span<const double> grad,
                     std::span<const double> hess) {
  NodeStats st;
  for (auto r : node_rows) {
    st.sum_grad += grad[r];
    st.sum_hess += hess[r];
  }
  st.count = node_rows.size();
  return st;
}

// Exact greedy level-wise tree fit on gradients `grad` with hessians `hess`.
// `leaf_of` receives the leaf node index reached by each training row.
RegressionTree fit_tree(std::span<const CountVector> rows, const Design& design,
                        std::span<const double> grad, std::span<const double> hess,
                        const BoostParams& params, std::vector<std::uint32_t>& leaf_of,
                        std::vector<double>& feature_gain) {
  const std::size_t n_rows = rows.size();
  const std::size_t min_leaf = params.min_samples_leaf;
  RegressionTree tree;
  tree.nodes.push_back(TreeNode{});

  std::vector<std::vector<std::uint32_t>> members(1);
  members[0].resize(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) members[0][r] = static_cast<std::uint32_t>(r);
  std::vector<NodeStats> stats{node_stats(members[0], grad, hess)};
  tree.nodes[0].samples = n_rows;

  // Histograms of the current frontier, keyed by node id.
  std::map<std::uint32_t, Histogram> hist;
  std::vector<std::uint32_t> frontier{0};
  if (params.max_depth > 0 && stats[0].count >= 2 * min_leaf) {
    fill_histogram(design, members[0], grad, hist[0]);
  }

  for (std::size_t depth = 0; depth < params.max_depth && !frontier.empty(); ++depth) {
    std::vector<std::uint32_t> next;
    std::map<std::uint32_t, Histogram> next_hist;
    const bool children_split = depth + 1 < params.max_depth;
    for (auto id : frontier) {
      auto it = hist.find(id);
      if (it == hist.end()) continue;
      const auto best = best_split(design, it->second, stats[id], min_leaf);
      if (best.feature < 0 || best.gain <= kMinSplitGain) continue;

      const auto l = static_cast<std::uint32_t>(tree.nodes.size());
      tree.nodes[id].feature = best.feature;
      tree.nodes[id].threshold = best.threshold;
      tree.nodes[id].gain = best.gain;
      tree.nodes[id].left = static_cast<int>(l);
      tree.nodes[id].right = static_cast<int>(l + 1);
      feature_gain[static_cast<std::size_t>(best.feature)] += best.gain;
      tree.nodes.push_back(TreeNode{});
      tree.nodes.push_back(TreeNode{});
      members.emplace_back();
      members.emplace_back();
      for (auto r : members[id]) {
        const double v = rows[r].count(static_cast<std::uint32_t>(best.feature));
        members[v <= best.threshold ? l : l + 1].push_back(r);
      }
      members[id].clear();
      members[id].shrink_to_fit();
      for (auto c : {l, l + 1}) {
        stats.push_back(node_stats(members[c], grad, hess));
        tree.nodes[c].samples = stats[c].count;
        next.push_back(c);
      }
      if (!children_split) continue;
      const bool left_small = stats[l].count <= stats[l + 1].count;
      const auto small = left_small ? l : l + 1;
      const auto large = left_small ? l + 1 : l;
      const bool split_small = stats[small].count >= 2 * min_leaf;
      const bool split_large = stats[large].count >= 2 * min_leaf;
      if (!split_small && !split_large) continue;
      Histogram& hs = next_hist[small];
      fill_histogram(design, members[small], grad, hs);
      if (split_large) {
        Histogram& hl = next_hist[large];
        hl = std::move(it->second);
        for (std::size_t j = 0; j < hl.sum.size(); ++j) {
          hl.sum[j] -= hs.sum[j];
          hl.count[j] -= hs.count[j];
        }
      }
      if (!split_small) next_hist.erase(small);
    }
    hist = std::move(next_hist);
    frontier = std::move(next);
  }

  leaf_of.assign(n_rows, 0);
  for (std::size_t id = 0; id < members.size(); ++id) {
    for (auto r : members[id]) leaf_of[r] = static_cast<std::uint32_t>(id);
  }

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].is_leaf()) {
      tree.nodes[i].value =
          params.learning_rate * stats[i].sum_grad / (stats[i].sum_hess + kHessianRegularizer);
    }
  }
  return tree;
}

void softmax_inplace(std::span<double> v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (auto& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (auto& x : v) x /= sum;
}

double mean_cross_entropy(const std::vector<double>& scores, std::span<const std::size_t> y,
                          std::size_t k) {
  double total = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    const double* row = &scores[r * k];
    const double mx = *std::max_element(row, row + k);
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) sum += std::exp(row[c] - mx);
    total += mx + std::log(sum) - row[y[r]];
  }
  return total / static_cast<double>(y.size());
}

}  // namespace

BoostModel train_boost(std::span<const CountVector> rows, std::span<const std::string> labels,
                       std::vector<std::string> feature_names, const BoostParams& params) {
  std::set<std::string> distinct(labels.begin(), labels.end());
  return train_boost(rows, labels, std::move(feature_names), params,
                     std::vector<std::string>(distinct.begin(), distinct.end()));
}

BoostModel train_boost(std::span<const CountVector> rows, std::span<const std::string> labels,
                       std::vector<std::string> feature_names, const BoostParams& params,
                       std::vector<std::string> classes) {
  params.validate();
  if (rows.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "rows and labels differ in length");
  }
  if (rows.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "boosting needs at least 2 training rows");
  }
  std::set<std::string_view> present(labels.begin(), labels.end());
  if (present.size() < 2) {
    throw Error(ErrorCode::kDegenerateTraining,
                "only one class present ('" + std::string(*present.begin()) + "')");
  }
  std::vector<std::size_t> y(labels.size());
  for (std::size_t r = 0; r < labels.size(); ++r) {
    auto it = std::find(classes.begin(), classes.end(), labels[r]);
    if (it == classes.end()) {
      throw Error(ErrorCode::kUnknownLabel, "label '" + labels[r] + "' not in class list");
    }
    y[r] = static_cast<std::size_t>(it - classes.begin());
  }

  const std::size_t n = rows.size();
  const std::size_t k = classes.size();
  BoostModel model;
  model.classes = std::move(classes);
  model.feature_names = std::move(feature_names);
  model.params = params;
  model.feature_gain.assign(model.feature_names.size(), 0.0);

  const auto design = make_design(rows, model.feature_names.size());
  std::vector<double> scores(n * k, 0.0);
  std::vector<double> prob(n * k);
  std::vector<double> grad(n), hess(n);
  std::vector<std::uint32_t> leaf_of;
  model.loss_trace.push_back(mean_cross_entropy(scores, y, k));

  for (std::size_t round = 0; round < params.rounds; ++round) {
    prob = scores;
    for (std::size_t r = 0; r < n; ++r) softmax_inplace(std::span<double>(&prob[r * k], k));
    std::vector<RegressionTree> round_trees;
    round_trees.reserve(k);
    std::vector<std::vector<std::uint32_t>> leaves(k);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t r = 0; r < n; ++r) {
        const double p = prob[r * k + c];
        grad[r] = (y[r] == c ? 1.0 : 0.0) - p;
        hess[r] = p * (1.0 - p);
      }
      round_trees.push_back(fit_tree(rows, design, grad, hess, params, leaf_of, model.feature_gain));
      leaves[c] = leaf_of;
    }
    for (std::size_t c = 0; c < k; ++c) {
      const auto& nodes = round_trees[c].nodes;
      for (std::size_t r = 0; r < n; ++r) scores[r * k + c] += nodes[leaves[c][r]].value;
    }
    model.trees.push_back(std::move(round_trees));
    model.loss_trace.push_back(mean_cross_entropy(scores, y, k));
  }
  return model;
}

Prediction predict(const BoostModel& model, const CountVector& x) {
  const std::size_t k = model.classes.size();
  std::vector<double> raw(k, 0.0);
  for (const auto& round : model.trees) {
    for (std::size_t c = 0; c < k && c < round.size(); ++c) raw[c] += round[c].evaluate(x);
  }
  Prediction out;
  out.class_index = 0;
  for (std::size_t c = 1; c < k; ++c) {
    if (raw[c] > raw[out.class_index]) out.class_index = c;
  }
  if (k > 0) out.label = model.classes[out.class_index];
  out.scores = raw;
  if (k > 0) softmax_inplace(out.scores);
  return out;
}

std::map<std::string, double> feature_importances(const BoostModel& model) {
  std::map<std::string, double> out;
  for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
    out[model.feature_names[f]] = f < model.feature_gain.size() ? model.feature_gain[f] : 0.0;
  }
  return out;
}

ImportanceBackend parse_importance_backend(std::string_view name) {
  if (name == "boost") return ImportanceBackend::kBoost;
  if (name == "mi-rank") return ImportanceBackend::kMiRank;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown importance backend '" + std::string(name) + "' (expected boost|mi-rank)");
}

std::string_view importance_backend_name(ImportanceBackend backend) {
  return backend == ImportanceBackend::kMiRank ? "mi-rank" : "boost";
}

void sort_sitfl_entries(std::vector<SitflEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const SitflEntry& a, const SitflEntry& b) {
    if (a.importance != b.importance) return a.importance > b.importance;
    return a.token < b.token;
  });
}

Sitfl build_sitfl(std::span<const TokenSequence> docs, std::span<const std::string> labels,
                  const SitflOptions& options, std::string corpus_digest) {
  if (options.n == 0) throw Error(ErrorCode::kInvalidArgument, "feature count must be >= 1");
  std::set<std::string_view> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) {
    throw Error(ErrorCode::kDegenerateTraining,
                "sITFL needs at least 2 classes, corpus has " + std::to_string(distinct.size()));
  }
  Sitfl sitfl;
  sitfl.n = options.n;
  sitfl.seed = options.boost.seed;
  sitfl.corpus_sha256 = std::move(corpus_digest);

  Vocabulary vocab;
  FeatureSet selected;
  try {
    vocab = build_vocabulary(docs, options.min_df);
    selected = select_features(vocab, docs, labels, options.n);
  } catch (const Error& e) {
    Error::rethrow_with_context(e, "feature selection");
  }

  if (options.backend == ImportanceBackend::kMiRank) {
    for (const auto& f : selected.features) sitfl.entries.push_back({f.token, f.mi});
    sort_sitfl_entries(sitfl.entries);
    return sitfl;
  }

  const auto indices = selected.indices();
  const Vocabulary features = vocab.restrict_to(indices);
  std::vector<CountVector> rows;
  rows.reserve(docs.size());
  for (const auto& doc : docs) rows.push_back(vectorize(doc, features));
  BoostModel model;
  try {
    model = train_boost(rows, labels, features.tokens(), options.boost);
  } catch (const Error& e) {
    Error::rethrow_with_context(e, "boosting");
  }
  for (const auto& [token, gain] : feature_importances(model)) sitfl.entries.push_back({token, gain});
  sort_sitfl_entries(sitfl.entries);
  return sitfl;
}

Sitfl build_sitfl(const Corpus& corpus, const SitflOptions& options) {
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return corpus[a].id < corpus[b].id; });
  std::vector<TokenSequence> docs;
  std::vector<std::string> labels;
  docs.reserve(order.size());
  labels.reserve(order.size());
  for (auto i : order) {
    docs.push_back(tokenize(corpus[i].text));
    labels.push_back(corpus[i].label);
  }
  return build_sitfl(docs, labels, options, corpus_sha256(corpus));
}

Sitfl build_sitfl(const Corpus& corpus, std::size_t n, const BoostParams& params) {
  SitflOptions options;
  options.n = n;
  options.boost = params;
  return build_sitfl(corpus, options);
}

namespace {

constexpr std::string_view kSitflMagic = "#textguide-sitfl";
constexpr std::string_view kSitflVersion = "v1";

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::kMalformedLine, "line " + std::to_string(line) + ": " + why);
}

}  // namespace

std::string format_sitfl(const Sitfl& sitfl) {
  std::string out;
  out += kSitflMagic;
  out += ' ';
  out += kSitflVersion;
  out += " n=" + std::to_string(sitfl.n);
  out += " corpus_sha256=" + sitfl.corpus_sha256;
  out += " seed=" + std::to_string(sitfl.seed);
  out += '\n';
  for (const auto& e : sitfl.entries) {
    out += e.token;
    out += '\t';
    out += format_double(e.importance);
    out += '\n';
  }
  return out;
}

Sitfl parse_sitfl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) malformed(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::istringstream header(line);
  std::string magic, version;
  header >> magic >> version;
  if (magic != kSitflMagic) malformed(1, "not a sITFL header");
  if (version != kSitflVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "expected " + std::string(kSitflVersion) + ", found '" + version + "'");
  }
  Sitfl sitfl;
  std::string field;
  bool has_n = false, has_hash = false, has_seed = false;
  while (header >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) malformed(1, "bad header field '" + field + "'");
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    try {
      std::size_t used = 0;
      if (key == "n") {
        sitfl.n = std::stoull(value, &used);
        has_n = used == value.size();
      } else if (key == "corpus_sha256") {
        sitfl.corpus_sha256 = value;
        has_hash = true;
      } else if (key == "seed") {
        sitfl.seed = std::stoull(value, &used);
        has_seed = used == value.size();
      }
    } catch (const std::exception&) {
      malformed(1, "bad header value '" + field + "'");
    }
  }
  if (!has_n || !has_hash || !has_seed) malformed(1, "header needs n, corpus_sha256 and seed");

  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos) {
      malformed(line_no, "expected <token>\\t<importance>");
    }
    SitflEntry entry;
    entry.token = line.substr(0, tab);
    const auto value = parse_double(std::string_view(line).substr(tab + 1));
    if (!value || !std::isfinite(*value) || *value < 0.0) {
      malformed(line_no, "importance must be a finite non-negative number");
    }
    entry.importance = *value;
    if (!seen.insert(entry.token).second) malformed(line_no, "duplicate token '" + entry.token + "'");
    if (!sitfl.entries.empty() && entry.importance > sitfl.entries.back().importance) {
      malformed(line_no, "importances must be non-increasing");
    }
    sitfl.entries.push_back(std::move(entry));
  }
  return sitfl;
}

void write_sitfl(const Sitfl& sitfl, const std::filesystem::path& path) {
  write_file_atomic(path, format_sitfl(sitfl));
}

Sitfl read_sitfl(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  try {
    return parse_sitfl(in);
  } catch (const Error& e) {
    Error::rethrow_with_context(e, path.string());
  }
}

}  // namespace textguide
