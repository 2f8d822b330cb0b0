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
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "textguide/evaluation.hpp"
#include "textguide/importance.hpp"
#include "textguide/truncation.hpp"

namespace textguide::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  std::optional<std::string> format;
  std::string sitfl_path;
  std::string provenance_path;

  std::size_t nta = kDefaultNta;
  double part1 = 0.2;
  double part2 = 0.1;
  std::size_t tn = 2;
  double hybrid_factor = kDefaultHybridFactor;
  // Split used by the head_tail baseline.
  double ht_part1 = 0.75;
  double ht_part2 = 0.25;

  std::size_t n_features = 2000;
  std::size_t min_df = 2;
  BoostParams boost;
  std::size_t folds = 5;
  std::uint64_t seed = 42;
  std::string leakage = "fold_safe";
  std::vector<std::string> strategies{"text_guide"};
  std::string importance = "boost";
  std::size_t jobs = 1;

  std::vector<double> grid_part1;
  std::vector<double> grid_part2;
  std::vector<std::size_t> grid_tn;
};

// Raised for flag/validation problems; maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TruncationConfig truncation_config(const RunConfig& cfg, Strategy strategy);
EvalOptions eval_options(const RunConfig& cfg);

int cmd_build_sitfl(const RunConfig& cfg, std::ostream& out);
int cmd_truncate(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_compare(const RunConfig& cfg, std::ostream& out);

// Parses argv (args[0] is the program name), dispatches, and maps errors to
// exit codes: 0 success, 1 pipeline failure, 2 usage or validation error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace textguide::cli
