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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/synthetic.hpp"
#include "textguide/cli.hpp"
#include "textguide/error.hpp"
#include "textguide/io.hpp"

using namespace textguide;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "textguide");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("textguide_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

Corpus cli_corpus() {
  testing::MidSignalSpec spec;
  spec.instances = 45;
  spec.classes = 3;
  spec.length = 60;
  spec.min_position = 15;
  spec.filler_vocab = 150;
  spec.planted = 3;
  return testing::mid_signal_corpus(spec);
}

void save(const Corpus& c, const std::string& path) { write_corpus(c, path, corpus_format_for(path)); }
Corpus load(const std::string& path) { return load_corpus(path, corpus_format_for(path)); }

const std::vector<std::string> kFast{"--rounds", "8", "--n-features", "40", "--min-df", "1"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("cli: build-sitfl, truncate, sweep and compare end to end") {
  Workspace ws;
  const auto corpus = cli_corpus();
  save(corpus, ws.path("in.jsonl"));

  auto built = run_cli(with({"build-sitfl", "-i", ws.path("in.jsonl"), "-o", ws.path("a.sitfl")}, kFast));
  REQUIRE(built.code == 0);
  CHECK(built.out.find("classes: 3") != std::string::npos);
  CHECK(run_cli(with({"build-sitfl", "-i", ws.path("in.jsonl"), "-o", ws.path("b.sitfl")}, kFast)).code == 0);
  CHECK(read_file(ws.path("a.sitfl")) == read_file(ws.path("b.sitfl")));

  const auto sitfl = read_sitfl(ws.path("a.sitfl"));
  auto truncated = run_cli({"truncate", "-i", ws.path("in.jsonl"), "-o", ws.path("out.jsonl"), "--strategy",
                            "text_guide", "--sitfl", ws.path("a.sitfl"), "--nta", "20", "--tn", "1",
                            "--provenance", ws.path("prov.jsonl"), "-j", "3"});
  REQUIRE(truncated.code == 0);
  CHECK(truncated.out.find("instances: 45 (45 truncated)") != std::string::npos);
  TruncationConfig cfg;
  cfg.nta = 20;
  cfg.tn = 1;
  const auto expected = apply_strategy(corpus, Strategy::kTextGuide, &sitfl, cfg);
  CHECK(load(ws.path("out.jsonl")) == expected.corpus);
  CHECK(read_file(ws.path("prov.jsonl")) == format_provenance(expected, Strategy::kTextGuide));

  auto ht = run_cli({"truncate", "-i", ws.path("in.jsonl"), "-o", ws.path("ht.csv"), "--strategy",
                     "head_tail", "--nta", "20"});
  REQUIRE(ht.code == 0);
  TruncationConfig htcfg;
  htcfg.nta = 20;
  htcfg.part1 = 0.75;
  htcfg.part2 = 0.25;
  CHECK(load(ws.path("ht.csv")) == apply_strategy(corpus, Strategy::kHeadTail, nullptr, htcfg).corpus);

  const std::vector<std::string> sweep_args{"sweep", "-i", ws.path("in.jsonl"), "--nta", "20", "--folds", "3",
                                            "--grid-part1", "0.1,0.3", "--grid-part2", "0,0.1",
                                            "--grid-tn", "1,2"};
  auto sw = run_cli(with(with(sweep_args, {"-o", ws.path("s1.csv")}), kFast));
  REQUIRE(sw.code == 0);
  CHECK(sw.out.find("grid points: 8") != std::string::npos);
  CHECK(run_cli(with(with(sweep_args, {"-o", ws.path("s2.csv"), "-j", "4"}), kFast)).code == 0);
  CHECK(read_file(ws.path("s1.csv")) == read_file(ws.path("s2.csv")));

  auto cmp = run_cli(with({"compare", "-i", ws.path("in.jsonl"), "-o", ws.path("cmp.json"), "--nta", "20",
                           "--folds", "3", "--strategy", "head,tail,text_guide"},
                          kFast));
  REQUIRE(cmp.code == 0);
  CHECK(cmp.out.find("ranking (3-fold, fold_safe)") != std::string::npos);
  CHECK(cmp.out.find("text_guide") != std::string::npos);
  CHECK(fs::exists(ws.path("cmp.json")));
}

TEST_CASE("cli: config files supply defaults") {
  Workspace ws;
  save(cli_corpus(), ws.path("in.jsonl"));
  std::ofstream(ws.path("run.ini")) << "nta = 12\nstrategy = head\n";
  auto r = run_cli({"truncate", "-i", ws.path("in.jsonl"), "-o", ws.path("out.jsonl"), "--config",
                    ws.path("run.ini")});
  REQUIRE(r.code == 0);
  const auto loaded = load(ws.path("out.jsonl"));
  for (const auto& row : loaded.instances()) CHECK(tokenize(row.text).size() == 12);
  CHECK(r.out.find("<=100%:45") != std::string::npos);

  std::ofstream(ws.path("bad.ini")) << "bogus = 1\n";
  CHECK(run_cli({"truncate", "-i", ws.path("in.jsonl"), "-o", ws.path("o2.jsonl"), "--config", ws.path("bad.ini")})
            .code == 2);
}

TEST_CASE("cli: usage errors exit with 2") {
  Workspace ws;
  save(cli_corpus(), ws.path("in.jsonl"));
  const auto in = ws.path("in.jsonl");
  const auto out = ws.path("out.jsonl");
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"truncate", "-i", in, "-o", out, "--strategy", "middle"}).code == 2);
  auto missing = run_cli({"truncate", "-i", in, "-o", out, "--strategy", "text_guide"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("MissingSitfl") != std::string::npos);
  CHECK(run_cli({"truncate", "-i", in, "-o", out, "--strategy", "head", "--part1", "0.8", "--part2", "0.5"})
            .code == 2);
  CHECK(run_cli({"truncate", "-i", in, "-o", out, "--strategy", "head_tail", "--ht-part1", "0.5",
                 "--ht-part2", "0.2"})
            .code == 2);
  CHECK(run_cli({"compare", "-i", in, "--folds", "1"}).code == 2);
  CHECK(run_cli({"truncate", "--nta", "abc"}).code == 2);
  CHECK(run_cli({"build-sitfl", "--help"}).code == 0);
  CHECK(!fs::exists(out));
}

TEST_CASE("cli: pipeline failures exit with 1") {
  Workspace ws;
  const Corpus single({{"1", "a b c", "only"}, {"2", "b c d", "only"}});
  save(single, ws.path("one.jsonl"));
  auto r = run_cli({"build-sitfl", "-i", ws.path("one.jsonl"), "-o", ws.path("x.sitfl")});
  CHECK(r.code == 1);
  CHECK(r.err.find("DegenerateTraining") != std::string::npos);
  CHECK(!fs::exists(ws.path("x.sitfl")));

  auto absent = run_cli({"truncate", "-i", ws.path("nope.jsonl"), "-o", ws.path("o.jsonl"), "--strategy", "head"});
  CHECK(absent.code == 1);
  CHECK(absent.err.find("nope.jsonl") != std::string::npos);

  std::ofstream(ws.path("bad.jsonl")) << "{\"id\":\"1\",\"text\":\"x\",\"label\":\"a\"}\n{not json}\n";
  auto bad = run_cli({"truncate", "-i", ws.path("bad.jsonl"), "-o", ws.path("o.jsonl"), "--strategy", "head"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("MalformedRow") != std::string::npos);
}
