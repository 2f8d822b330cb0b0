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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "textguide/corpus.hpp"
#include "textguide/error.hpp"
#include "textguide/evaluation.hpp"
#include "textguide/features.hpp"
#include "textguide/importance.hpp"
#include "textguide/truncation.hpp"

namespace py = pybind11;
using namespace textguide;

namespace {

Corpus corpus_from_rows(const std::vector<py::dict>& rows) {
  std::vector<TextInstance> instances;
  instances.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    TextInstance inst;
    inst.id = row.contains("id") && !row["id"].is_none() ? row["id"].cast<std::string>()
                                                          : std::to_string(i);
    inst.text = row["text"].cast<std::string>();
    inst.label = row["label"].cast<std::string>();
    instances.push_back(std::move(inst));
  }
  return Corpus(std::move(instances));
}

py::list corpus_rows(const Corpus& corpus) {
  py::list out;
  for (const auto& inst : corpus.instances()) {
    py::dict row;
    row["id"] = inst.id;
    row["text"] = inst.text;
    row["label"] = inst.label;
    out.append(row);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Guided truncation of long labeled texts";

  static py::exception<Error> error_type(m, "TextguideError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    }
  });

  // corpus
  py::class_<Corpus>(m, "Corpus")
      .def(py::init(&corpus_from_rows), py::arg("rows"),
           "Build from a list of {'id'?, 'text', 'label'} dicts.")
      .def("__len__", &Corpus::size)
      .def_property_readonly("labels", &Corpus::labels)
      .def("rows", &corpus_rows)
      .def("__eq__", [](const Corpus& a, const Corpus& b) { return a == b; });

  m.def("tokenize", &tokenize, py::arg("text"));
  m.def("detokenize", [](const std::vector<std::string>& t) { return detokenize(t); },
        py::arg("tokens"));
  m.def("load_corpus",
        [](const std::filesystem::path& path, const std::string& format) {
          return load_corpus(path, parse_corpus_format(format));
        },
        py::arg("path"), py::arg("format") = "jsonl");
  m.def("write_corpus",
        [](const Corpus& c, const std::filesystem::path& path, const std::string& format) {
          write_corpus(c, path, parse_corpus_format(format));
        },
        py::arg("corpus"), py::arg("path"), py::arg("format") = "jsonl");
  m.def("stratified_folds",
        [](const Corpus& c, std::size_t k, std::uint64_t seed) {
          return stratified_folds(c, k, seed).folds;
        },
        py::arg("corpus"), py::arg("k") = 5, py::arg("seed") = 42,
        "Fold index per instance, in corpus order.");

  // features
  m.def("select_features",
        [](const Corpus& c, std::size_t n, std::size_t min_df) {
          const auto vocab = build_vocabulary(c, min_df);
          std::vector<std::pair<std::string, double>> out;
          for (const auto& f : select_features(vocab, c, n).features) out.emplace_back(f.token, f.mi);
          return out;
        },
        py::arg("corpus"), py::arg("n"), py::arg("min_df") = 1,
        "(token, MI in nats) pairs, highest MI first.");

  // importance
  py::class_<BoostParams>(m, "BoostParams")
      .def(py::init<>())
      .def_readwrite("rounds", &BoostParams::rounds)
      .def_readwrite("learning_rate", &BoostParams::learning_rate)
      .def_readwrite("max_depth", &BoostParams::max_depth)
      .def_readwrite("min_samples_leaf", &BoostParams::min_samples_leaf)
      .def_readwrite("seed", &BoostParams::seed);

  py::class_<Sitfl>(m, "Sitfl")
      .def_property_readonly("entries",
                             [](const Sitfl& s) {
                               std::vector<std::pair<std::string, double>> out;
                               for (const auto& e : s.entries) out.emplace_back(e.token, e.importance);
                               return out;
                             })
      .def_readonly("n", &Sitfl::n)
      .def_readonly("corpus_sha256", &Sitfl::corpus_sha256)
      .def_readonly("seed", &Sitfl::seed)
      .def("tokens",
           [](const Sitfl& s) {
             std::vector<std::string> out;
             for (const auto& e : s.entries) out.push_back(e.token);
             return out;
           })
      .def("__len__", &Sitfl::size)
      .def("__eq__", [](const Sitfl& a, const Sitfl& b) { return a == b; })
      .def("to_text", &format_sitfl)
      .def_static("from_text", [](const std::string& text) {
        std::istringstream in(text);
        return parse_sitfl(in);
      });

  m.def("build_sitfl",
        [](const Corpus& c, std::size_t n, const BoostParams& params, std::size_t min_df,
           const std::string& importance) {
          SitflOptions o;
          o.n = n;
          o.min_df = min_df;
          o.boost = params;
          o.backend = parse_importance_backend(importance);
          return build_sitfl(c, o);
        },
        py::arg("corpus"), py::arg("n") = 2000, py::arg("params") = BoostParams{},
        py::arg("min_df") = 2, py::arg("importance") = "boost");
  m.def("read_sitfl", &read_sitfl, py::arg("path"));
  m.def("write_sitfl", &write_sitfl, py::arg("sitfl"), py::arg("path"));

  // truncation
  py::class_<TruncationConfig>(m, "TruncationConfig")
      .def(py::init([](std::size_t nta, double part1, double part2, std::size_t tn,
                       std::optional<double> hybrid_factor) {
             TruncationConfig c;
             c.nta = nta;
             c.part1 = part1;
             c.part2 = part2;
             c.tn = tn;
             c.hybrid_factor = hybrid_factor;
             c.validate();
             return c;
           }),
           py::arg("nta") = kDefaultNta, py::arg("part1") = 0.2, py::arg("part2") = 0.1,
           py::arg("tn") = 2, py::arg("hybrid_factor") = py::none())
      .def_readwrite("nta", &TruncationConfig::nta)
      .def_readwrite("part1", &TruncationConfig::part1)
      .def_readwrite("part2", &TruncationConfig::part2)
      .def_readwrite("tn", &TruncationConfig::tn)
      .def_readwrite("hybrid_factor", &TruncationConfig::hybrid_factor)
      .def_property_readonly("head_budget", &TruncationConfig::head_budget)
      .def_property_readonly("tail_budget", &TruncationConfig::tail_budget)
      .def_property_readonly("fill_budget", &TruncationConfig::fill_budget);

  m.def("truncate_head",
        [](const std::vector<std::string>& t, std::size_t nta) { return truncate_head(t, nta); },
        py::arg("tokens"), py::arg("nta"));
  m.def("truncate_tail",
        [](const std::vector<std::string>& t, std::size_t nta) { return truncate_tail(t, nta); },
        py::arg("tokens"), py::arg("nta"));
  m.def("truncate_head_tail",
        [](const std::vector<std::string>& t, std::size_t nta, double p1, double p2) {
          return truncate_head_tail(t, nta, p1, p2);
        },
        py::arg("tokens"), py::arg("nta"), py::arg("part1") = 0.2, py::arg("part2") = 0.8);
  m.def("text_guide",
        [](const std::vector<std::string>& t, const Sitfl& s, const TruncationConfig& c) {
          return text_guide(t, s, c);
        },
        py::arg("tokens"), py::arg("sitfl"), py::arg("cfg"));
  m.def("text_guide_hybrid",
        [](const std::vector<std::string>& t, const Sitfl& s, const TruncationConfig& c) {
          return text_guide_hybrid(t, s, c);
        },
        py::arg("tokens"), py::arg("sitfl"), py::arg("cfg"));
  m.def("sitfl_from_tokens",
        [](const std::vector<std::string>& tokens) {
          Sitfl s;
          s.n = tokens.size();
          for (std::size_t i = 0; i < tokens.size(); ++i) {
            s.entries.push_back({tokens[i], static_cast<double>(tokens.size() - i)});
          }
          return s;
        },
        py::arg("tokens"), "A sITFL ranking `tokens` in the given order.");
  m.def("apply_strategy",
        [](const Corpus& c, const std::string& strategy, const Sitfl* sitfl,
           const TruncationConfig& cfg, std::size_t jobs) {
          return apply_strategy(c, parse_strategy(strategy), sitfl, cfg, jobs).corpus;
        },
        py::arg("corpus"), py::arg("strategy"), py::arg("sitfl") = nullptr, py::arg("cfg"),
        py::arg("jobs") = 1);

  // evaluation
  m.def("mcc",
        [](const std::vector<std::vector<std::uint64_t>>& counts) {
          ConfusionMatrix cm;
          cm.counts = counts;
          cm.classes.resize(counts.size());
          return mcc(cm);
        },
        py::arg("counts"), "Multiclass MCC of a square confusion matrix (rows = truth).");
  m.def("confusion",
        [](const std::vector<std::string>& t, const std::vector<std::string>& p,
           const std::vector<std::string>& classes) { return confusion(t, p, classes).counts; },
        py::arg("y_true"), py::arg("y_pred"), py::arg("classes"));

  m.def("compare_strategies",
        [](const Corpus& c, const std::vector<std::pair<std::string, TruncationConfig>>& specs,
           std::size_t k, std::uint64_t seed, const BoostParams& boost, const std::string& leakage,
           std::size_t n_features, std::size_t min_df, std::size_t jobs) {
          std::vector<StrategySpec> s;
          for (const auto& [name, cfg] : specs) s.push_back({parse_strategy(name), cfg});
          EvalOptions o;
          o.k = k;
          o.seed = seed;
          o.boost = boost;
          o.leakage = parse_leakage_mode(leakage);
          o.n_features = n_features;
          o.min_df = min_df;
          o.jobs = jobs;
          std::vector<std::pair<std::string, std::vector<double>>> out;
          for (const auto& r : compare_strategies(c, s, o)) out.emplace_back(r.strategy, r.fold_mcc);
          return out;
        },
        py::arg("corpus"), py::arg("specs"), py::arg("k") = 5, py::arg("seed") = 42,
        py::arg("boost") = BoostParams{}, py::arg("leakage") = "fold_safe",
        py::arg("n_features") = 2000, py::arg("min_df") = 2, py::arg("jobs") = 1,
        "Per-strategy (description, fold MCCs) on paired stratified folds.");

  m.def("sweep_csv",
        [](const Corpus& c, const std::vector<double>& part1, const std::vector<double>& part2,
           const std::vector<std::size_t>& tn, std::size_t nta, std::size_t k, std::uint64_t seed,
           const BoostParams& boost, std::size_t n_features, std::size_t min_df, std::size_t jobs) {
          EvalOptions o;
          o.k = k;
          o.seed = seed;
          o.boost = boost;
          o.n_features = n_features;
          o.min_df = min_df;
          o.jobs = jobs;
          return format_sweep_csv(sweep(c, SweepGrid{part1, part2, tn}, nta, o));
        },
        py::arg("corpus"), py::arg("part1"), py::arg("part2"), py::arg("tn"), py::arg("nta"),
        py::arg("k") = 5, py::arg("seed") = 42, py::arg("boost") = BoostParams{},
        py::arg("n_features") = 2000, py::arg("min_df") = 2, py::arg("jobs") = 1);
}
