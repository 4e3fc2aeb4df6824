// Copyright 2026 The kscan Authors.
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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kscan/dataset.hpp"
#include "kscan/distance.hpp"
#include "kscan/ksweep.hpp"
#include "kscan/oracle.hpp"

namespace kscan {

enum class RunMode { kSweep, kNaiveFull, kNaiveLog };

std::string_view to_string(RunMode mode);
RunMode parse_run_mode(std::string_view name);

struct RunConfig {
  std::optional<std::filesystem::path> input;
  std::optional<SyntheticSpec> synthetic;
  std::string label_column = "label";
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  Metric metric = Metric::kEuclidean;
  TieBreakPolicy policy = TieBreakPolicy::kSmallestCode;
  RunMode mode = RunMode::kSweep;
  std::size_t memory_budget = kDefaultMemoryBudget;
  unsigned threads = 0;
  unsigned repeat = 1;
  std::optional<std::filesystem::path> output;       // JSON
  std::optional<std::filesystem::path> curve_output;  // CSV
  std::optional<std::filesystem::path> matrix_dump;   // binary, sweep mode only
};

/// Throws Usage / BadFoldCount / BadParams before any data is touched.
void validate(const RunConfig& config);

/// Parses "n,d,s,spread".
SyntheticSpec parse_synthetic(std::string_view text);

struct DatasetInfo {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t s = 0;
  std::size_t f = 0;
};

struct OptimizeResult {
  DatasetInfo dataset;
  KSearchReport report;
  // correct counts per evaluated k, one entry per fold
  std::vector<std::vector<std::uint64_t>> correct;
};

/// Load or generate, fold, search in the configured mode. Writes the JSON
/// report and curve CSV when the config names them.
OptimizeResult run_optimize(const RunConfig& config);

/// Full JSON document written by run_optimize: the report plus run context.
nlohmann::json optimize_json(const RunConfig& config, const OptimizeResult& result);

struct ModeTiming {
  RunMode mode = RunMode::kSweep;
  PhaseTiming timing;
  std::size_t k_star = 0;
};

struct BenchResult {
  DatasetInfo dataset;
  std::vector<ModeTiming> modes;
  // naive total / sweep total, for each non-sweep mode (empty without sweep)
  std::vector<std::pair<RunMode, double>> speedups;
  bool k_star_agreement = false;
};

/// Runs every mode on the same data and folds. Before reporting, checks that
/// all modes produced the same per-fold counts at every k they share.
BenchResult run_bench(const RunConfig& config, std::span<const RunMode> modes);
nlohmann::json to_json(const BenchResult& bench);

inline constexpr std::size_t kCurveFoldCounts[] = {3, 5, 10, 20};

struct CurvesResult {
  std::vector<std::pair<std::size_t, double>> fold_times;
  std::vector<std::filesystem::path> files;
};

/// Sweep at f = 3, 5, 10, 20; writes curve_f<f>.csv per fold count and
/// fold_timing.csv ("f,time_seconds") into out_dir.
CurvesResult run_curves(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace kscan
