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

// kscan: pick k for kNN classification by cross-validated search.
//
//   kscan optimize --synthetic 1000,4,3,0.5 --folds 5 --output report.json
//   kscan bench    --input data.csv --label-col class --mode sweep --mode naive-full
//   kscan curves   --synthetic 1000,4,3,0.5 --output curves/
//
// Exit codes: 0 success, 1 unexpected failure, otherwise the ErrorCode value
// (2 usage, 3 parse, 4 empty dataset, 5 single class, 6 non-finite feature,
// 7 bad fold count, 8 too many folds, 9 bad params, 10 memory budget,
// 11 inconsistent inputs, 12 k too large, 13 dimension mismatch, 14 io,
// 15 cross-mode disagreement, 16 empty neighbourhood).

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kscan/app.hpp"
#include "kscan/error.hpp"
#include "kscan/report.hpp"

namespace {

struct RawOptions {
  std::string input;
  std::string synthetic;
  std::string label_col = "label";
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  std::string metric = "euclidean";
  std::string tie_policy = "smallest_code";
  std::vector<std::string> modes;
  std::size_t memory_budget = kscan::kDefaultMemoryBudget;
  unsigned threads = 0;
  unsigned repeat = 1;
  std::string output;
  std::string curve;
  std::string dump_matrix;
};

void add_common(CLI::App* cmd, RawOptions& raw) {
  cmd->add_option("--input", raw.input, "CSV file with a header row");
  cmd->add_option("--synthetic", raw.synthetic, "Gaussian mixture n,d,s,spread instead of --input");
  cmd->add_option("--label-col", raw.label_col, "Label column name or zero-based index")->capture_default_str();
  cmd->add_option("--folds", raw.folds, "Number of cross-validation folds")->capture_default_str();
  cmd->add_option("--seed", raw.seed, "Seed for fold shuffling and synthetic data")->capture_default_str();
  cmd->add_option("--metric", raw.metric, "euclidean | manhattan | chebyshev")->capture_default_str();
  cmd->add_option("--tie-policy", raw.tie_policy, "smallest_code | shadow_min")->capture_default_str();
  cmd->add_option("--memory-budget", raw.memory_budget, "Refuse to build a distance matrix larger than this (bytes)")
      ->capture_default_str();
  cmd->add_option("--threads", raw.threads, "Worker threads, 0 = all cores")->capture_default_str();
  cmd->add_option("--repeat", raw.repeat, "Repeat each timed run and keep the fastest")->capture_default_str();
}

kscan::RunConfig to_config(const RawOptions& raw) {
  kscan::RunConfig config;
  if (!raw.input.empty()) config.input = raw.input;
  if (!raw.synthetic.empty()) config.synthetic = kscan::parse_synthetic(raw.synthetic);
  config.label_column = raw.label_col;
  config.folds = raw.folds;
  config.seed = raw.seed;
  config.metric = kscan::parse_metric(raw.metric);
  config.policy = kscan::parse_tie_policy(raw.tie_policy);
  if (!raw.modes.empty()) config.mode = kscan::parse_run_mode(raw.modes.front());
  config.memory_budget = raw.memory_budget;
  config.threads = raw.threads;
  config.repeat = raw.repeat;
  return config;
}

int optimize(const RawOptions& raw) {
  if (raw.modes.size() > 1) throw kscan::Error(kscan::ErrorCode::kUsage, "optimize takes a single --mode");
  kscan::RunConfig config = to_config(raw);
  if (!raw.output.empty()) config.output = raw.output;
  if (!raw.curve.empty()) config.curve_output = raw.curve;
  if (!raw.dump_matrix.empty()) config.matrix_dump = raw.dump_matrix;

  const auto result = kscan::run_optimize(config);
  const auto& r = result.report;
  std::printf("n=%zu d=%zu s=%zu f=%zu mode=%s\n", result.dataset.n, result.dataset.d, result.dataset.s,
              result.dataset.f, std::string(kscan::to_string(config.mode)).c_str());
  std::printf("k*=%zu (k_max=%zu, per-fold best:", r.k_star, r.k_max);
  for (std::size_t k : r.best_k_per_fold) std::printf(" %zu", k);
  std::printf(")\n");
  if (config.mode == kscan::RunMode::kSweep) {
    std::printf("time: distance %.6fs  sort %.6fs  sweep %.6fs  total %.6fs\n", r.timing.distance_seconds,
                r.timing.sort_seconds, r.timing.sweep_seconds, r.timing.total_seconds);
  } else {
    std::printf("time: total %.6fs\n", r.timing.total_seconds);
  }
  return 0;
}

int bench(const RawOptions& raw) {
  kscan::RunConfig config = to_config(raw);
  std::vector<kscan::RunMode> modes;
  for (const auto& m : raw.modes) modes.push_back(kscan::parse_run_mode(m));
  if (raw.modes.empty()) modes = {kscan::RunMode::kSweep, kscan::RunMode::kNaiveFull};

  const auto result = kscan::run_bench(config, modes);
  const auto j = kscan::to_json(result);
  if (raw.output.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    kscan::write_json_file(raw.output, j);
    for (const auto& m : result.modes) {
      std::printf("%-10s total %.6fs  k*=%zu\n", std::string(kscan::to_string(m.mode)).c_str(),
                  m.timing.total_seconds, m.k_star);
    }
    for (const auto& [mode, ratio] : result.speedups) {
      std::printf("speedup vs %s: %.1fx\n", std::string(kscan::to_string(mode)).c_str(), ratio);
    }
  }
  return 0;
}

int curves(const RawOptions& raw) {
  if (raw.output.empty()) throw kscan::Error(kscan::ErrorCode::kUsage, "curves needs --output <dir>");
  const auto result = kscan::run_curves(to_config(raw), raw.output);
  for (const auto& [f, t] : result.fold_times) std::printf("f=%zu  %.6fs\n", f, t);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-validated search for the k in k-nearest-neighbour classification"};
  app.require_subcommand(1);
  RawOptions raw;

  auto* opt = app.add_subcommand("optimize", "Run one search and report k*");
  add_common(opt, raw);
  opt->add_option("--mode", raw.modes, "sweep | naive-full | naive-log")->expected(1);
  opt->add_option("--output", raw.output, "Write the JSON report here");
  opt->add_option("--curve", raw.curve, "Write the accuracy curve CSV here");
  opt->add_option("--dump-matrix", raw.dump_matrix, "Write the sorted distance matrix (binary) here");

  auto* bch = app.add_subcommand("bench", "Time several modes on identical data and folds");
  add_common(bch, raw);
  bch->add_option("--mode", raw.modes, "Modes to compare (repeatable), default sweep and naive-full")
      ->delimiter(',');
  bch->add_option("--output", raw.output, "Write the JSON result here instead of stdout");

  auto* crv = app.add_subcommand("curves", "Sweep at 3, 5, 10 and 20 folds and export curves");
  add_common(crv, raw);
  crv->add_option("--output", raw.output, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(kscan::ErrorCode::kUsage);
  }

  try {
    if (opt->parsed()) return optimize(raw);
    if (bch->parsed()) return bench(raw);
    return curves(raw);
  } catch (const kscan::Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", kscan::error_name(e.code()), e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
