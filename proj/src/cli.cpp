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

#include "textguide/cli.hpp"

#include <algorithm>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "textguide/corpus.hpp"
#include "textguide/error.hpp"
#include "textguide/io.hpp"

namespace textguide::cli {

namespace {

CorpusFormat format_for(const RunConfig& cfg, const std::string& path) {
  if (cfg.format) return parse_corpus_format(*cfg.format);
  return corpus_format_for(path);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

std::vector<Strategy> parse_strategies(const RunConfig& cfg) {
  std::vector<Strategy> out;
  for (const auto& name : cfg.strategies) {
    try {
      out.push_back(parse_strategy(name));
    } catch (const Error& e) {
      throw UsageError(e.detail());
    }
  }
  require(!out.empty(), "no strategy given (valid: " + strategy_names() + ")");
  return out;
}

// Converts library validation failures into usage errors.
template <typename Fn>
auto validated(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument || e.code() == ErrorCode::kInvalidSplit) {
      throw UsageError(e.what());
    }
    throw;
  }
}

void print_top(std::ostream& out, const Sitfl& sitfl, std::size_t count) {
  const std::size_t shown = std::min(count, sitfl.size());
  for (std::size_t i = 0; i < shown; ++i) {
    out << "  " << std::setw(2) << (i + 1) << ". " << sitfl.entries[i].token << "\t"
        << format_double(sitfl.entries[i].importance) << "\n";
  }
}

}  // namespace

TruncationConfig truncation_config(const RunConfig& cfg, Strategy strategy) {
  TruncationConfig t;
  t.nta = cfg.nta;
  t.tn = cfg.tn;
  if (strategy == Strategy::kHeadTail) {
    t.part1 = cfg.ht_part1;
    t.part2 = cfg.ht_part2;
  } else {
    t.part1 = cfg.part1;
    t.part2 = cfg.part2;
  }
  if (strategy == Strategy::kHybrid) t.hybrid_factor = cfg.hybrid_factor;
  validated([&] {
    t.validate();
    if (strategy == Strategy::kHeadTail) truncate_head_tail({}, t.nta, t.part1, t.part2);
    return 0;
  });
  return t;
}

EvalOptions eval_options(const RunConfig& cfg) {
  EvalOptions o;
  o.k = cfg.folds;
  o.seed = cfg.seed;
  o.boost = cfg.boost;
  o.boost.seed = cfg.seed;
  o.n_features = cfg.n_features;
  o.min_df = cfg.min_df;
  o.jobs = std::max<std::size_t>(cfg.jobs, 1);
  validated([&] {
    o.leakage = parse_leakage_mode(cfg.leakage);
    o.backend = parse_importance_backend(cfg.importance);
    o.boost.validate();
    return 0;
  });
  require(o.k >= 2, "--folds must be >= 2");
  require(o.n_features >= 1, "--n-features must be >= 1");
  return o;
}

int cmd_build_sitfl(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.input.empty(), "--input is required");
  require(!cfg.output.empty(), "--output is required");
  SitflOptions options;
  options.n = cfg.n_features;
  options.min_df = cfg.min_df;
  options.boost = cfg.boost;
  options.boost.seed = cfg.seed;
  validated([&] {
    options.backend = parse_importance_backend(cfg.importance);
    options.boost.validate();
    return 0;
  });
  require(options.n >= 1, "--n-features must be >= 1");

  const Corpus corpus = load_corpus(cfg.input, format_for(cfg, cfg.input));
  const Sitfl sitfl = build_sitfl(corpus, options);
  write_sitfl(sitfl, cfg.output);
  out << "N: " << sitfl.n << " (" << sitfl.size() << " features listed)\n";
  out << "classes: " << corpus.labels().size() << "\n";
  out << "top tokens:\n";
  print_top(out, sitfl, 10);
  return kExitOk;
}

int cmd_truncate(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.input.empty(), "--input is required");
  require(!cfg.output.empty(), "--output is required");
  const auto strategies = parse_strategies(cfg);
  require(strategies.size() == 1, "truncate takes exactly one --strategy");
  const Strategy strategy = strategies.front();
  const TruncationConfig tcfg = truncation_config(cfg, strategy);
  if (strategy_needs_sitfl(strategy) && cfg.sitfl_path.empty()) {
    throw UsageError("MissingSitfl: strategy '" + std::string(strategy_name(strategy)) +
                     "' requires --sitfl");
  }

  const Corpus corpus = load_corpus(cfg.input, format_for(cfg, cfg.input));
  std::optional<Sitfl> sitfl;
  if (strategy_needs_sitfl(strategy)) sitfl = read_sitfl(cfg.sitfl_path);
  const auto result = apply_strategy(corpus, strategy, sitfl ? &*sitfl : nullptr, tcfg,
                                     std::max<std::size_t>(cfg.jobs, 1));
  write_corpus(result.corpus, cfg.output, format_for(cfg, cfg.output));
  if (!cfg.provenance_path.empty()) {
    write_file_atomic(cfg.provenance_path, format_provenance(result, strategy));
  }

  std::vector<std::size_t> lengths;
  std::size_t cut = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto before = tokenize(corpus[i].text).size();
    const auto after = tokenize(result.corpus[i].text).size();
    lengths.push_back(after);
    if (after < before) ++cut;
  }
  std::sort(lengths.begin(), lengths.end());
  out << "instances: " << corpus.size() << " (" << cut << " truncated)\n";
  if (!lengths.empty()) {
    out << "output tokens: min " << lengths.front() << ", median " << lengths[lengths.size() / 2]
        << ", max " << lengths.back() << "\n";
    // Quartile buckets of the budget.
    std::size_t buckets[4] = {0, 0, 0, 0};
    for (auto len : lengths) {
      const std::size_t q = (4 * len + tcfg.nta - 1) / tcfg.nta;
      const std::size_t b = std::min<std::size_t>(3, q > 0 ? q - 1 : 0);
      ++buckets[b];
    }
    out << "histogram (fraction of nta=" << tcfg.nta << "):";
    const char* names[4] = {"<=25%", "<=50%", "<=75%", "<=100%"};
    for (int b = 0; b < 4; ++b) out << " " << names[b] << ":" << buckets[b];
    out << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.input.empty(), "--input is required");
  require(!cfg.output.empty(), "--output is required");
  SweepGrid grid = SweepGrid::standard();
  if (!cfg.grid_part1.empty()) grid.part1 = cfg.grid_part1;
  if (!cfg.grid_part2.empty()) grid.part2 = cfg.grid_part2;
  if (!cfg.grid_tn.empty()) grid.tn = cfg.grid_tn;
  require(grid.size() > 0, "sweep grid is empty");
  require(cfg.nta >= 1, "--nta must be >= 1");
  const EvalOptions options = eval_options(cfg);

  const Corpus corpus = load_corpus(cfg.input, format_for(cfg, cfg.input));
  const SweepResult result = sweep(corpus, grid, cfg.nta, options);
  write_file_atomic(cfg.output, format_sweep_csv(result));

  out << "grid points: " << result.rows.size() << " (leakage " << cfg.leakage << ")\n";
  const auto& best = result.rows.front();
  if (best.error) {
    out << "every grid point failed; first error: " << *best.error << "\n";
    return kExitRuntime;
  }
  out << "best: part1=" << format_double(best.part1) << " part2=" << format_double(best.part2)
      << " tn=" << best.tn << " mean MCC=" << std::fixed << std::setprecision(4) << best.mean_mcc
      << "\n";
  return kExitOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.input.empty(), "--input is required");
  const auto strategies = parse_strategies(cfg);
  std::vector<StrategySpec> specs;
  for (auto s : strategies) specs.push_back({s, truncation_config(cfg, s)});
  const EvalOptions options = eval_options(cfg);

  const Corpus corpus = load_corpus(cfg.input, format_for(cfg, cfg.input));
  const auto results = compare_strategies(corpus, specs, options);
  if (!cfg.output.empty()) write_file_atomic(cfg.output, format_cv_results_json(results));

  std::vector<std::size_t> order(results.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return results[a].mean_mcc > results[b].mean_mcc;
  });
  out << "ranking (" << options.k << "-fold, " << leakage_mode_name(options.leakage) << "):\n";
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& res = results[order[r]];
    out << "  " << (r + 1) << ". " << res.strategy << "  mean MCC " << std::fixed
        << std::setprecision(4) << res.mean_mcc << "\n";
  }
  return kExitOk;
}

namespace {

void add_corpus_flags(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--input,-i", cfg.input, "Input corpus (JSONL or CSV)");
  sub.add_option("--output,-o", cfg.output, "Output path");
  sub.add_option("--format", cfg.format, "Corpus format; inferred from the extension if omitted")
      ->check(CLI::IsMember({"jsonl", "csv"}));
}

void add_truncation_flags(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--nta", cfg.nta, "Token budget")->capture_default_str();
  sub.add_option("--part1", cfg.part1, "Fraction of nta taken from the start")->capture_default_str();
  sub.add_option("--part2", cfg.part2, "Fraction of nta taken from the end")->capture_default_str();
  sub.add_option("--tn", cfg.tn, "Neighbour tokens on each side of an important token")
      ->capture_default_str();
  sub.add_option("--hybrid-factor", cfg.hybrid_factor,
                 "Hybrid: head-only below hybrid_factor * nta")
      ->capture_default_str();
  sub.add_option("--ht-part1", cfg.ht_part1, "head_tail baseline: start fraction")->capture_default_str();
  sub.add_option("--ht-part2", cfg.ht_part2, "head_tail baseline: end fraction")->capture_default_str();
}

void add_model_flags(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--n-features", cfg.n_features, "Features kept by MI selection")->capture_default_str();
  sub.add_option("--min-df", cfg.min_df, "Minimum document frequency")->capture_default_str();
  sub.add_option("--rounds", cfg.boost.rounds, "Boosting rounds")->capture_default_str();
  sub.add_option("--learning-rate", cfg.boost.learning_rate, "Boosting learning rate")
      ->capture_default_str();
  sub.add_option("--max-depth", cfg.boost.max_depth, "Tree depth (<= 6)")->capture_default_str();
  sub.add_option("--min-samples-leaf", cfg.boost.min_samples_leaf, "Minimum rows per leaf")
      ->capture_default_str();
  sub.add_option("--seed", cfg.seed, "Seed for every random choice")->capture_default_str();
  sub.add_option("--importance", cfg.importance, "Importance backend: boost|mi-rank")
      ->capture_default_str();
  sub.add_option("--jobs,-j", cfg.jobs, "Worker threads")->capture_default_str();
}

void add_eval_flags(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--folds", cfg.folds, "Cross-validation folds")->capture_default_str();
  sub.add_option("--leakage", cfg.leakage, "fold_safe|corpus_level")->capture_default_str();
}

}  // namespace

namespace {

struct Parser {
  CLI::App app{"textguide: guided truncation of long labeled texts"};
  CLI::App* build = nullptr;
  CLI::App* trunc = nullptr;
  CLI::App* sweep = nullptr;
  CLI::App* compare = nullptr;
  std::string config_path;

  Parser(RunConfig& cfg, const std::string& name) {
    app.name(name);
    app.require_subcommand(1);

    build = app.add_subcommand("build-sitfl", "Rank token features by boosted-tree importance");
    add_corpus_flags(*build, cfg);
    add_model_flags(*build, cfg);

    trunc = app.add_subcommand("truncate", "Truncate every instance of a corpus to nta tokens");
    add_corpus_flags(*trunc, cfg);
    add_truncation_flags(*trunc, cfg);
    trunc->add_option("--strategy", cfg.strategies, "identity|head|tail|head_tail|text_guide|hybrid")
        ->delimiter(',');
    trunc->add_option("--sitfl", cfg.sitfl_path, "sITFL file (text_guide, hybrid)");
    trunc->add_option("--provenance", cfg.provenance_path, "Write per-instance segment sidecar JSONL");
    trunc->add_option("--jobs,-j", cfg.jobs, "Worker threads")->capture_default_str();

    sweep = app.add_subcommand("sweep", "Cross-validate text_guide over a Part1 x Part2 x TN grid");
    add_corpus_flags(*sweep, cfg);
    add_truncation_flags(*sweep, cfg);
    add_model_flags(*sweep, cfg);
    add_eval_flags(*sweep, cfg);
    sweep->add_option("--grid-part1", cfg.grid_part1, "Part1 values (default 0.1..0.5)")->delimiter(',');
    sweep->add_option("--grid-part2", cfg.grid_part2, "Part2 values (default 0,0.05,0.1,0.15)")
        ->delimiter(',');
    sweep->add_option("--grid-tn", cfg.grid_tn, "TN values (default 1..10)")->delimiter(',');

    compare = app.add_subcommand("compare", "Cross-validate several strategies on paired folds");
    add_corpus_flags(*compare, cfg);
    add_truncation_flags(*compare, cfg);
    add_model_flags(*compare, cfg);
    add_eval_flags(*compare, cfg);
    compare->add_option("--strategy", cfg.strategies, "Comma-separated strategies")->delimiter(',');

    for (auto* sub : subcommands()) {
      sub->add_option("--config", config_path, "File of key = value lines; flags override it");
    }
  }

  std::vector<CLI::App*> subcommands() const { return {build, trunc, sweep, compare}; }

  CLI::App* selected() const {
    for (auto* sub : subcommands()) {
      if (sub->parsed()) return sub;
    }
    return nullptr;
  }
};

// Turns config file entries into flags for `sub`, skipping any flag already
// given on the command line.
std::vector<std::string> config_args(const CLI::App& sub, const std::string& path) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::FileError& e) {
    throw UsageError(e.what());
  }
  std::vector<std::string> out;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const std::string key = item.fullname();
    require(item.parents.empty() || (item.parents.size() == 1 && item.parents[0] == sub.get_name()),
            "config " + path + ": unexpected section for key '" + key + "'");
    require(item.name != "config", "config " + path + ": nested config files are not supported");
    const CLI::Option* opt = sub.get_option_no_throw("--" + item.name);
    require(opt != nullptr, "config " + path + ": unknown key '" + item.name + "'");
    if (opt->count() > 0) continue;
    out.push_back("--" + item.name);
    out.insert(out.end(), item.inputs.begin(), item.inputs.end());
  }
  return out;
}

int dispatch(const Parser& p, const RunConfig& cfg, std::ostream& out) {
  if (p.build->parsed()) return cmd_build_sitfl(cfg, out);
  if (p.trunc->parsed()) return cmd_truncate(cfg, out);
  if (p.sweep->parsed()) return cmd_sweep(cfg, out);
  if (p.compare->parsed()) return cmd_compare(cfg, out);
  return kExitUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::string name = args.empty() ? "textguide" : args.front();
  std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());

  try {
    auto cfg = std::make_unique<RunConfig>();
    auto parser = std::make_unique<Parser>(*cfg, name);
    auto parse = [&](std::vector<std::string> a) {
      std::reverse(a.begin(), a.end());
      parser->app.parse(std::move(a));
    };
    try {
      parse(argv_tail);
      if (!parser->config_path.empty()) {
        const CLI::App* sub = parser->selected();
        auto extra = config_args(*sub, parser->config_path);
        std::vector<std::string> merged{sub->get_name()};
        merged.insert(merged.end(), extra.begin(), extra.end());
        merged.insert(merged.end(), argv_tail.begin() + 1, argv_tail.end());
        cfg = std::make_unique<RunConfig>();
        parser = std::make_unique<Parser>(*cfg, name);
        parse(merged);
      }
    } catch (const CLI::ParseError& e) {
      const int code = parser->app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitUsage;
    }
    return dispatch(*parser, *cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace textguide::cli
