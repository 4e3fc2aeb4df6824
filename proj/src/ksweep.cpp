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

#include "kscan/ksweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

#include "kscan/error.hpp"
#include "kscan/parallel.hpp"

namespace kscan {

namespace {

// Feeds the first `depth` entries of one row into its count/shadow row,
// reporting the running vote after each step. Entries past the end of the row
// are skipped and the previous vote stands.
template <typename OnVote>
void walk_row(std::span<const NeighborEntry> row, std::size_t depth, std::span<std::uint32_t> counts,
              std::span<double> shadow, TieBreakPolicy policy, OnVote&& on_vote) {
  std::optional<ClassCode> leader;
  const std::size_t reachable = std::min(depth, row.size());
  for (std::size_t k = 1; k <= depth; ++k) {
    if (k <= reachable) {
      const NeighborEntry& e = row[k - 1];
      ++counts[e.label];
      shadow[e.label] += e.distance;
      // Only e.label moved, so the winner is either the old leader or e.label.
      if (!leader || (*leader != e.label && outranks(e.label, *leader, counts, shadow, policy))) {
        leader = e.label;
      }
    }
    if (!leader) throw Error(ErrorCode::kEmptyNeighborhood, "row has no neighbours");
    on_vote(k, *leader);
  }
}

}  // namespace

std::string_view to_string(TieBreakPolicy policy) {
  return policy == TieBreakPolicy::kShadowMin ? "shadow_min" : "smallest_code";
}

TieBreakPolicy parse_tie_policy(std::string_view name) {
  if (name == "smallest_code" || name == "smallest-code") return TieBreakPolicy::kSmallestCode;
  if (name == "shadow_min" || name == "shadow-min") return TieBreakPolicy::kShadowMin;
  throw Error(ErrorCode::kUsage, "unknown tie policy '" + std::string(name) + "'");
}

ClassCode classify_at_k(std::span<const std::uint32_t> counts, std::span<const double> shadow,
                        TieBreakPolicy policy) {
  if (shadow.size() != counts.size()) throw Error(ErrorCode::kDimensionMismatch, "counts/shadow length differ");
  if (std::all_of(counts.begin(), counts.end(), [](std::uint32_t c) { return c == 0; })) {
    throw Error(ErrorCode::kEmptyNeighborhood, "cannot vote with an empty neighbourhood");
  }
  ClassCode best = 0;
  for (ClassCode c = 1; c < counts.size(); ++c) {
    if (outranks(c, best, counts, shadow, policy)) best = c;
  }
  return best;
}

CountState accumulate_counts(const SortedDistanceMatrix& matrix, std::size_t depth) {
  CountState state;
  state.rows = matrix.size();
  state.classes = matrix.num_classes();
  state.counts.assign(state.rows * state.classes, 0);
  state.shadow.assign(state.rows * state.classes, 0.0);
  if (depth == 0) return state;
  for (std::size_t r = 0; r < state.rows; ++r) {
    std::span<std::uint32_t> counts(state.counts.data() + r * state.classes, state.classes);
    std::span<double> shadow(state.shadow.data() + r * state.classes, state.classes);
    const auto row = matrix.row(r);
    if (row.empty()) continue;
    walk_row(row, depth, counts, shadow, TieBreakPolicy::kSmallestCode, [](std::size_t, ClassCode) {});
  }
  return state;
}

AccuracyMatrix::AccuracyMatrix(std::size_t depth, std::vector<std::size_t> fold_sizes)
    : depth_(depth), fold_sizes_(std::move(fold_sizes)), correct_(depth_ * fold_sizes_.size(), 0) {}

AccuracyMatrix sweep(const SortedDistanceMatrix& matrix, const FoldAssignment& folds,
                     std::span<const ClassCode> truth, const SweepOptions& options) {
  const std::size_t n = matrix.size();
  if (folds.size() != n || truth.size() != n || folds.num_folds() != matrix.num_folds()) {
    throw Error(ErrorCode::kInconsistentInputs, "matrix, folds and labels disagree on shape");
  }
  if (matrix.k_max() < 1) throw Error(ErrorCode::kInconsistentInputs, "matrix has no usable neighbours");
  const std::size_t depth = options.depth == 0 ? matrix.k_max() : options.depth;
  if (depth > matrix.k_max()) {
    throw Error(ErrorCode::kInconsistentInputs, "depth " + std::to_string(depth) + " exceeds k_max " +
                                                    std::to_string(matrix.k_max()));
  }
  const std::size_t s = matrix.num_classes();
  const std::size_t f = folds.num_folds();
  for (ClassCode c : truth) {
    if (c >= s) throw Error(ErrorCode::kInconsistentInputs, "truth label out of range");
  }

  AccuracyMatrix acc(depth, folds.fold_sizes);
  const unsigned workers = resolve_threads(options.threads);

  auto score_row = [&](std::size_t r, std::vector<std::uint32_t>& counts, std::vector<double>& shadow,
                       auto&& hit) {
    std::fill(counts.begin(), counts.end(), 0u);
    std::fill(shadow.begin(), shadow.end(), 0.0);
    const ClassCode want = truth[r];
    walk_row(matrix.row(r), depth, counts, shadow, options.policy, [&](std::size_t k, ClassCode vote) {
      if (vote == want) hit(k);
    });
  };

  if (workers == 1 || f >= workers) {
    // Each worker owns whole folds and writes its own columns of A.
    std::vector<std::vector<std::size_t>> rows_of(f);
    for (std::size_t r = 0; r < n; ++r) rows_of[folds.fold_of[r]].push_back(r);
    parallel_chunks(f, workers, [&](std::size_t first, std::size_t last, unsigned) {
      std::vector<std::uint32_t> counts(s);
      std::vector<double> shadow(s);
      for (std::size_t fold = first; fold < last; ++fold) {
        for (std::size_t r : rows_of[fold]) {
          score_row(r, counts, shadow, [&](std::size_t k) { ++acc.correct(k, fold); });
        }
      }
    });
  } else {
    std::vector<AccuracyMatrix> partial(workers, AccuracyMatrix(depth, folds.fold_sizes));
    parallel_chunks(n, workers, [&](std::size_t first, std::size_t last, unsigned w) {
      std::vector<std::uint32_t> counts(s);
      std::vector<double> shadow(s);
      auto& local = partial[w];
      for (std::size_t r = first; r < last; ++r) {
        const FoldIndex fold = folds.fold_of[r];
        score_row(r, counts, shadow, [&](std::size_t k) { ++local.correct(k, fold); });
      }
    });
    for (const auto& local : partial) {
      for (std::size_t k = 1; k <= depth; ++k) {
        for (std::size_t i = 0; i < f; ++i) acc.correct(k, i) += local.correct(k, i);
      }
    }
  }
  return acc;
}

KSearchReport select_k_from(std::span<const std::size_t> evaluated_k,
                            std::span<const std::vector<std::uint64_t>> correct_rows,
                            std::span<const std::size_t> fold_sizes, std::size_t k_max) {
  if (evaluated_k.empty() || evaluated_k.size() != correct_rows.size() || fold_sizes.empty()) {
    throw Error(ErrorCode::kInconsistentInputs, "nothing to select from");
  }
  const std::size_t f = fold_sizes.size();
  KSearchReport report;
  report.k_max = k_max;
  report.evaluated_k.assign(evaluated_k.begin(), evaluated_k.end());
  report.best_k_per_fold.assign(f, evaluated_k.front());

  std::vector<std::uint64_t> best_correct(f, 0);
  for (std::size_t j = 0; j < evaluated_k.size(); ++j) {
    const auto& row = correct_rows[j];
    if (row.size() != f) throw Error(ErrorCode::kInconsistentInputs, "row width differs from fold count");
    double sum = 0.0;
    std::vector<double> per_fold(f);
    for (std::size_t i = 0; i < f; ++i) {
      per_fold[i] = static_cast<double>(row[i]) / static_cast<double>(fold_sizes[i]);
      sum += per_fold[i];
      // Strict improvement only: the earliest (smallest) k keeps ties.
      if (j == 0 || row[i] > best_correct[i]) {
        best_correct[i] = row[i];
        report.best_k_per_fold[i] = evaluated_k[j];
      }
    }
    const double mean = sum / static_cast<double>(f);
    double sq = 0.0;
    for (double a : per_fold) sq += (a - mean) * (a - mean);
    report.curve.push_back({evaluated_k[j], mean, std::sqrt(sq / static_cast<double>(f))});
  }

  std::size_t total = 0;
  for (std::size_t k : report.best_k_per_fold) total += k;
  // Round half up: floor(total / f + 1/2).
  report.k_star = std::clamp<std::size_t>((2 * total + f) / (2 * f), 1, std::max<std::size_t>(k_max, 1));
  return report;
}

KSearchReport select_k(const AccuracyMatrix& acc) {
  std::vector<std::size_t> ks(acc.depth());
  std::vector<std::vector<std::uint64_t>> rows(acc.depth());
  for (std::size_t k = 1; k <= acc.depth(); ++k) {
    ks[k - 1] = k;
    const auto row = acc.row(k);
    rows[k - 1].assign(row.begin(), row.end());
  }
  return select_k_from(ks, rows, acc.fold_sizes(), acc.depth());
}

void accuracy_curve_export(const KSearchReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "k,mean_accuracy,std_accuracy\n";
  char buf[96];
  for (const auto& p : report.curve) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f\n", p.k, p.mean_accuracy, p.std_accuracy);
    out << buf;
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace kscan
