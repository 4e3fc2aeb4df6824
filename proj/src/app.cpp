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

#include "kscan/app.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>

#include "kscan/error.hpp"
#include "kscan/report.hpp"

namespace kscan {

namespace {

using Clock = std::chrono::steady_clock;

Dataset load_input(const RunConfig& config) {
  if (config.input) return load_csv(*config.input, LabelColumn{config.label_column});
  return generate_synthetic(*config.synthetic, config.seed);
}

DatasetInfo describe(const Dataset& dataset, std::size_t folds) {
  return {dataset.size(), dataset.dims(), dataset.num_classes(), folds};
}

OptimizeResult sweep_once(const Dataset& dataset, const FoldAssignment& folds, const RunConfig& config,
                          SortedDistanceMatrix* keep_matrix) {
  const auto start = Clock::now();
  BuildTiming build_timing;
  SortedDistanceMatrix matrix =
      build_sorted_matrix(dataset, folds, {config.metric, config.memory_budget, config.threads}, &build_timing);
  const auto sweep_start = Clock::now();
  const AccuracyMatrix acc = sweep(matrix, folds, dataset.labels(), {config.policy, 0, config.threads});
  OptimizeResult result;
  result.report = select_k(acc);
  const auto end = Clock::now();

  result.report.timing.distance_seconds = build_timing.distance_seconds;
  result.report.timing.sort_seconds = build_timing.sort_seconds;
  result.report.timing.sweep_seconds = std::chrono::duration<double>(end - sweep_start).count();
  result.report.timing.total_seconds = std::chrono::duration<double>(end - start).count();
  for (std::size_t k = 1; k <= acc.depth(); ++k) {
    const auto row = acc.row(k);
    result.correct.emplace_back(row.begin(), row.end());
  }
  if (keep_matrix) *keep_matrix = std::move(matrix);
  return result;
}

OptimizeResult naive_once(const Dataset& dataset, const FoldAssignment& folds, const RunConfig& config,
                          RunMode mode) {
  const std::size_t k_max = fold_k_max(folds);
  const KSchedule schedule = mode == RunMode::kNaiveFull ? full_schedule(k_max) : logarithmic_schedule(k_max);
  OptimizeResult result;
  result.report = naive_search(dataset, folds, schedule, {config.metric, config.policy, config.threads, false},
                               &result.correct);
  return result;
}

// Minimum-total run out of config.repeat; outputs are identical across runs.
OptimizeResult run_mode(const Dataset& dataset, const FoldAssignment& folds, const RunConfig& config, RunMode mode,
                        SortedDistanceMatrix* keep_matrix) {
  std::optional<OptimizeResult> best;
  for (unsigned i = 0; i < std::max(1u, config.repeat); ++i) {
    OptimizeResult run = mode == RunMode::kSweep ? sweep_once(dataset, folds, config, i == 0 ? keep_matrix : nullptr)
                                                 : naive_once(dataset, folds, config, mode);
    if (!best || run.report.timing.total_seconds < best->report.timing.total_seconds) best = std::move(run);
  }
  best->dataset = describe(dataset, folds.num_folds());
  return std::move(*best);
}

std::size_t parse_size(std::string_view text, std::string_view what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kUsage, "bad " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kSweep: return "sweep";
    case RunMode::kNaiveFull: return "naive-full";
    case RunMode::kNaiveLog: return "naive-log";
  }
  return "unknown";
}

RunMode parse_run_mode(std::string_view name) {
  if (name == "sweep") return RunMode::kSweep;
  if (name == "naive-full") return RunMode::kNaiveFull;
  if (name == "naive-log") return RunMode::kNaiveLog;
  throw Error(ErrorCode::kUsage, "unknown mode '" + std::string(name) + "'");
}

SyntheticSpec parse_synthetic(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    parts.push_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 4) throw Error(ErrorCode::kUsage, "--synthetic expects n,d,s,spread");
  SyntheticSpec spec;
  spec.n = parse_size(parts[0], "n");
  spec.dims = parse_size(parts[1], "d");
  spec.classes = parse_size(parts[2], "s");
  const auto [ptr, ec] = std::from_chars(parts[3].data(), parts[3].data() + parts[3].size(), spec.spread);
  if (ec != std::errc() || ptr != parts[3].data() + parts[3].size()) {
    throw Error(ErrorCode::kUsage, "bad spread: '" + std::string(parts[3]) + "'");
  }
  return spec;
}

void validate(const RunConfig& config) {
  if (config.input.has_value() == config.synthetic.has_value()) {
    throw Error(ErrorCode::kUsage, "exactly one of --input or --synthetic is required");
  }
  if (config.folds < 2) {
    throw Error(ErrorCode::kBadFoldCount, "fold count must be at least 2, got " + std::to_string(config.folds));
  }
  if (config.repeat < 1) throw Error(ErrorCode::kUsage, "--repeat must be at least 1");
  if (config.matrix_dump && config.mode != RunMode::kSweep) {
    throw Error(ErrorCode::kUsage, "a matrix dump is only produced in sweep mode");
  }
  if (config.input && config.label_column.empty()) throw Error(ErrorCode::kUsage, "--label-col is empty");
  if (config.synthetic) {
    const auto& s = *config.synthetic;
    if (s.classes < 2 || s.n < s.classes || s.dims < 1 || !(s.spread > 0.0)) {
      throw Error(ErrorCode::kBadParams, "synthetic data needs n >= s >= 2, d >= 1, spread > 0");
    }
  }
}

OptimizeResult run_optimize(const RunConfig& config) {
  validate(config);
  const Dataset dataset = load_input(config);
  const FoldAssignment folds = stratified_folds(dataset, config.folds, config.seed);
  SortedDistanceMatrix matrix;
  OptimizeResult result =
      run_mode(dataset, folds, config, config.mode, config.matrix_dump ? &matrix : nullptr);
  if (config.output) write_json_file(*config.output, optimize_json(config, result));
  if (config.curve_output) accuracy_curve_export(result.report, *config.curve_output);
  if (config.matrix_dump) matrix.write_binary(*config.matrix_dump);
  return result;
}

nlohmann::json optimize_json(const RunConfig& config, const OptimizeResult& result) {
  nlohmann::json j = to_json(result.report);
  j["mode"] = to_string(config.mode);
  j["metric"] = to_string(config.metric);
  j["tie_policy"] = to_string(config.policy);
  j["seed"] = config.seed;
  j["dataset"] = {{"n", result.dataset.n}, {"d", result.dataset.d}, {"s", result.dataset.s}, {"f", result.dataset.f}};
  return j;
}

BenchResult run_bench(const RunConfig& config, std::span<const RunMode> modes) {
  validate(config);
  std::vector<RunMode> unique(modes.begin(), modes.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  if (unique.size() < 2) throw Error(ErrorCode::kUsage, "bench needs at least two distinct modes");

  const Dataset dataset = load_input(config);
  const FoldAssignment folds = stratified_folds(dataset, config.folds, config.seed);

  std::vector<OptimizeResult> runs;
  for (RunMode mode : unique) runs.push_back(run_mode(dataset, folds, config, mode, nullptr));

  // Full-depth reference: sweep if present, otherwise naive-full.
  const OptimizeResult* reference = nullptr;
  for (std::size_t i = 0; i < unique.size() && !reference; ++i) {
    if (unique[i] == RunMode::kSweep) reference = &runs[i];
  }
  for (std::size_t i = 0; i < unique.size() && !reference; ++i) {
    if (unique[i] == RunMode::kNaiveFull) reference = &runs[i];
  }

  if (reference) {
    std::map<std::size_t, std::size_t> row_of;
    for (std::size_t j = 0; j < reference->report.evaluated_k.size(); ++j) row_of[reference->report.evaluated_k[j]] = j;
    for (std::size_t i = 0; i < unique.size(); ++i) {
      const auto& run = runs[i];
      for (std::size_t j = 0; j < run.report.evaluated_k.size(); ++j) {
        const std::size_t k = run.report.evaluated_k[j];
        const auto it = row_of.find(k);
        if (it == row_of.end() || reference->correct[it->second] != run.correct[j]) {
          throw Error(ErrorCode::kAgreement, std::string(to_string(unique[i])) + " disagrees with the reference at k=" +
                                                 std::to_string(k));
        }
      }
      const bool full_depth = unique[i] != RunMode::kNaiveLog;
      if (full_depth && run.report.k_star != reference->report.k_star) {
        throw Error(ErrorCode::kAgreement, std::string(to_string(unique[i])) + " selected a different k*");
      }
    }
  }

  BenchResult bench;
  bench.dataset = describe(dataset, folds.num_folds());
  bench.k_star_agreement = true;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    bench.modes.push_back({unique[i], runs[i].report.timing, runs[i].report.k_star});
    bench.k_star_agreement = bench.k_star_agreement && runs[i].report.k_star == runs[0].report.k_star;
  }
  const auto sweep_it = std::find(unique.begin(), unique.end(), RunMode::kSweep);
  if (sweep_it != unique.end()) {
    const double sweep_time = runs[static_cast<std::size_t>(sweep_it - unique.begin())].report.timing.total_seconds;
    for (std::size_t i = 0; i < unique.size(); ++i) {
      if (unique[i] == RunMode::kSweep) continue;
      bench.speedups.emplace_back(unique[i], runs[i].report.timing.total_seconds / sweep_time);
    }
  }
  return bench;
}

nlohmann::json to_json(const BenchResult& bench) {
  nlohmann::json modes = nlohmann::json::object();
  for (const auto& m : bench.modes) {
    nlohmann::json entry = {{"k_star", m.k_star}, {"total_seconds", m.timing.total_seconds}};
    if (m.mode == RunMode::kSweep) {
      entry["distance_seconds"] = m.timing.distance_seconds;
      entry["sort_seconds"] = m.timing.sort_seconds;
      entry["sweep_seconds"] = m.timing.sweep_seconds;
    }
    modes[std::string(to_string(m.mode))] = std::move(entry);
  }
  nlohmann::json speedup = nlohmann::json::object();
  for (const auto& [mode, ratio] : bench.speedups) speedup[std::string(to_string(mode))] = ratio;
  return {
      {"dataset", {{"n", bench.dataset.n}, {"d", bench.dataset.d}, {"s", bench.dataset.s}, {"f", bench.dataset.f}}},
      {"modes", std::move(modes)},
      {"speedup", std::move(speedup)},
      {"k_star_agreement", bench.k_star_agreement},
  };
}

CurvesResult run_curves(const RunConfig& config, const std::filesystem::path& out_dir) {
  validate(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw Error(ErrorCode::kIo, "cannot create output directory " + out_dir.string());
  }
  const Dataset dataset = load_input(config);
  CurvesResult result;
  for (std::size_t f : kCurveFoldCounts) {
    const FoldAssignment folds = stratified_folds(dataset, f, config.seed);
    const OptimizeResult run = run_mode(dataset, folds, config, RunMode::kSweep, nullptr);
    const auto path = out_dir / ("curve_f" + std::to_string(f) + ".csv");
    accuracy_curve_export(run.report, path);
    result.files.push_back(path);
    result.fold_times.emplace_back(f, run.report.timing.total_seconds);
  }
  const auto summary = out_dir / "fold_timing.csv";
  std::ofstream out(summary, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + summary.string());
  out << "f,time_seconds\n";
  char buf[64];
  for (const auto& [f, t] : result.fold_times) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", f, t);
    out << buf;
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + summary.string());
  result.files.push_back(summary);
  return result;
}

}  // namespace kscan
