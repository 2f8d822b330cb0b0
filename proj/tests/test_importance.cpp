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
#include <filesystem>
#include <numeric>
#include <random>
#include <sstream>

#include "support/synthetic.hpp"
#include "textguide/error.hpp"
#include "textguide/importance.hpp"
#include "textguide/io.hpp"

using namespace textguide;

namespace {

// Class A instances contain "key"; class B never does. Filler is shared.
Corpus separable_corpus(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TextInstance> rows;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    auto tokens = testing::random_tokens(rng, 15, 20);
    const bool a = i % 2 == 0;
    if (a) tokens[rng() % tokens.size()] = "key";
    rows.push_back({"r" + std::to_string(i), detokenize(tokens), a ? "A" : "B"});
  }
  return Corpus(std::move(rows));
}

struct Dataset {
  std::vector<CountVector> rows;
  std::vector<std::string> labels;
  std::vector<std::string> names;
};

Dataset vectorized(const Corpus& corpus) {
  const auto tc = TokenizedCorpus::from(corpus);
  const auto vocab = build_vocabulary(tc.docs, 1);
  Dataset d;
  for (const auto& doc : tc.docs) d.rows.push_back(vectorize(doc, vocab));
  d.labels = tc.labels;
  d.names = vocab.tokens();
  return d;
}

double walked_gain(const BoostModel& model) {
  double sum = 0.0;
  for (const auto& round : model.trees)
    for (const auto& tree : round)
      for (const auto& node : tree.nodes)
        if (!node.is_leaf()) sum += node.gain;
  return sum;
}

}  // namespace

TEST_CASE("boosting separates the one-token toy set") {
  const auto data = vectorized(separable_corpus(10, 1));
  BoostParams params;
  params.rounds = 20;
  const auto model = train_boost(data.rows, data.labels, data.names, params);
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    CHECK(predict(model, data.rows[i]).label == data.labels[i]);
  }
  const auto imp = feature_importances(model);
  const double key_gain = imp.at("key");
  for (const auto& [token, gain] : imp) {
    if (token != "key") CHECK(gain < key_gain);
  }
}

TEST_CASE("constant labels are degenerate") {
  std::vector<CountVector> rows(4);
  std::vector<std::string> labels(4, "only");
  try {
    train_boost(rows, labels, {}, BoostParams{});
    FAIL("expected DegenerateTraining");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateTraining);
  }
}

TEST_CASE("boost parameters are validated") {
  BoostParams p;
  p.learning_rate = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p.learning_rate = 1.0;
  p.max_depth = 7;
  CHECK_THROWS_AS(p.validate(), Error);
  p.max_depth = 6;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("training loss never increases and trees respect depth and leaf size") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 8; ++trial) {
    const auto corpus = testing::random_corpus(rng, 30 + rng() % 30, 2 + rng() % 3, 12, 25);
    if (corpus.labels().size() < 2) continue;
    const auto data = vectorized(corpus);
    BoostParams params;
    params.rounds = 40;
    params.max_depth = 1 + rng() % 4;
    params.min_samples_leaf = 1 + rng() % 5;
    const auto model = train_boost(data.rows, data.labels, data.names, params);
    REQUIRE(model.loss_trace.size() == params.rounds + 1);
    for (std::size_t r = 1; r < model.loss_trace.size(); ++r) {
      CHECK(model.loss_trace[r] <= model.loss_trace[r - 1] + 1e-9);
    }
    for (const auto& round : model.trees) {
      for (const auto& tree : round) {
        CHECK(tree.depth() <= params.max_depth);
        for (const auto& node : tree.nodes) {
          if (node.is_leaf()) CHECK(node.samples >= params.min_samples_leaf);
        }
      }
    }
    const auto imp = feature_importances(model);
    double sum = 0.0;
    for (const auto& [t, g] : imp) {
      CHECK(g >= 0.0);
      sum += g;
    }
    CHECK(sum == doctest::Approx(walked_gain(model)).epsilon(1e-12));
  }
}

TEST_CASE("predict: zero rounds is uniform and picks the first class") {
  BoostModel model;
  model.classes = {"x", "y", "z"};
  const auto p = predict(model, CountVector{});
  CHECK(p.label == "x");
  CHECK(p.class_index == 0);
  for (double s : p.scores) CHECK(s == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("predicted scores are a probability vector") {
  std::mt19937_64 rng(4);
  const auto corpus = testing::random_corpus(rng, 40, 3, 10, 20);
  const auto data = vectorized(corpus);
  BoostParams params;
  params.rounds = 15;
  const auto model = train_boost(data.rows, data.labels, data.names, params);
  for (const auto& row : data.rows) {
    const auto p = predict(model, row);
    const double sum = std::accumulate(p.scores.begin(), p.scores.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(p.label == model.classes[p.class_index]);
  }
}

TEST_CASE("unused features have zero importance") {
  const auto data = vectorized(separable_corpus(10, 2));
  auto names = data.names;
  names.push_back("never_seen");
  BoostParams params;
  params.rounds = 5;
  const auto model = train_boost(data.rows, data.labels, names, params);
  CHECK(feature_importances(model).at("never_seen") == 0.0);
}

TEST_CASE("build_sitfl ranks the discriminative token first and is deterministic") {
  const auto corpus = separable_corpus(15, 3);
  BoostParams params;
  params.rounds = 20;
  const auto sitfl = build_sitfl(corpus, 50, params);
  REQUIRE(!sitfl.empty());
  CHECK(sitfl.entries.front().token == "key");
  for (std::size_t i = 1; i < sitfl.size(); ++i) {
    CHECK(sitfl.entries[i].importance <= sitfl.entries[i - 1].importance);
  }
  CHECK(format_sitfl(build_sitfl(corpus, 50, params)) == format_sitfl(sitfl));
  CHECK(sitfl.corpus_sha256 == corpus_sha256(corpus));

  // Shuffling the rows does not change the list.
  auto rows = corpus.instances();
  std::mt19937_64 rng(77);
  std::shuffle(rows.begin(), rows.end(), rng);
  CHECK(build_sitfl(Corpus(rows), 50, params) == sitfl);
}

TEST_CASE("mi-rank backend orders by MI") {
  const auto corpus = separable_corpus(15, 5);
  SitflOptions options;
  options.n = 10;
  options.min_df = 1;
  options.backend = ImportanceBackend::kMiRank;
  const auto sitfl = build_sitfl(corpus, options);
  const auto vocab = build_vocabulary(corpus, 1);
  const auto fs = select_features(vocab, corpus, 10);
  REQUIRE(sitfl.size() == fs.features.size());
  for (std::size_t i = 0; i < sitfl.size(); ++i) {
    CHECK(sitfl.entries[i].token == fs.features[i].token);
    CHECK(sitfl.entries[i].importance == fs.features[i].mi);
  }
  CHECK(sitfl.entries.front().token == "key");
}

TEST_CASE("single-class corpus cannot produce a sITFL") {
  const Corpus corpus({{"1", "a b", "x"}, {"2", "b c", "x"}});
  try {
    build_sitfl(corpus, 10, BoostParams{});
    FAIL("expected DegenerateTraining");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateTraining);
  }
}

TEST_CASE("sITFL file format") {
  Sitfl s;
  s.n = 3;
  s.seed = 18446744073709551615ULL;
  s.corpus_sha256 = std::string(64, 'a');
  s.entries = {{"alpha", 0.1 + 0.2}, {"beta", 1e-300}, {"gamma", 0.0}};
  const auto text = format_sitfl(s);
  CHECK(text.substr(0, text.find('\n')) ==
        "#textguide-sitfl v1 n=3 corpus_sha256=" + std::string(64, 'a') + " seed=18446744073709551615");
  std::istringstream in(text);
  CHECK(parse_sitfl(in) == s);

  const auto path = std::filesystem::temp_directory_path() / "textguide_test.sitfl";
  write_sitfl(s, path);
  CHECK(read_sitfl(path) == s);
  std::filesystem::remove(path);

  std::istringstream hand("#textguide-sitfl v1 n=2 corpus_sha256=ab seed=1\nfoo\t2.5\nbar\t1\n");
  const auto parsed = parse_sitfl(hand);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed.entries[0] == SitflEntry{"foo", 2.5});
  CHECK(parsed.entries[1] == SitflEntry{"bar", 1.0});
}

TEST_CASE("sITFL parse errors") {
  auto code = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_sitfl(in);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  const std::string header = "#textguide-sitfl v1 n=2 corpus_sha256=ab seed=1\n";
  CHECK(code(header + "foo\tnan\n") == ErrorCode::kMalformedLine);
  CHECK(code(header + "foo\t-1\n") == ErrorCode::kMalformedLine);
  CHECK(code(header + "foo 1\n") == ErrorCode::kMalformedLine);
  CHECK(code(header + "foo\t1\nfoo\t1\n") == ErrorCode::kMalformedLine);
  CHECK(code(header + "foo\t1\nbar\t2\n") == ErrorCode::kMalformedLine);
  CHECK(code("#textguide-sitfl v2 n=2 corpus_sha256=ab seed=1\n") == ErrorCode::kVersionMismatch);
  CHECK(code("hello\n") == ErrorCode::kMalformedLine);
  CHECK(code("#textguide-sitfl v1 n=2\n") == ErrorCode::kMalformedLine);

  std::istringstream nan_line(header + "ok\t3\nfoo\tNaN\n");
  try {
    parse_sitfl(nan_line);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}
