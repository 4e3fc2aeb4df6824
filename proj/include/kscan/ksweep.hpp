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
#include <span>
#include <string_view>
#include <vector>

#include "kscan/dataset.hpp"
#include "kscan/distance.hpp"

namespace kscan {

enum class TieBreakPolicy : std::uint32_t {
  kSmallestCode = 0,  // among tied majority classes, the lowest code
  kShadowMin = 1,     // the tied class with the smallest summed distance, then lowest code
};

std::string_view to_string(TieBreakPolicy policy);
TieBreakPolicy parse_tie_policy(std::string_view name);

/// True when class `a` beats class `b` in a vote. This is the one ordering
/// every classifier in the library uses.
inline bool outranks(ClassCode a, ClassCode b, std::span<const std::uint32_t> counts,
                     std::span<const double> shadow, TieBreakPolicy policy) noexcept {
  if (counts[a] != counts[b]) return counts[a] > counts[b];
  if (policy == TieBreakPolicy::kShadowMin && shadow[a] != shadow[b]) return shadow[a] < shadow[b];
  return a < b;
}

/// Majority vote over one row of the counting and shadow matrices.
/// Throws EmptyNeighborhood when every count is zero.
ClassCode classify_at_k(std::span<const std::uint32_t> counts, std::span<const double> shadow,
                        TieBreakPolicy policy);

/// Per-row class tallies (M) and summed distances (S) after reading the first
/// `depth` neighbours of each row.
struct CountState {
  std::size_t rows = 0;
  std::size_t classes = 0;
  std::vector<std::uint32_t> counts;
  std::vector<double> shadow;

  std::span<const std::uint32_t> counts_row(std::size_t r) const noexcept {
    return {counts.data() + r * classes, classes};
  }
  std::span<const double> shadow_row(std::size_t r) const noexcept {
    return {shadow.data() + r * classes, classes};
  }
};

/// Rows shorter than `depth` stop at their last entry.
CountState accumulate_counts(const SortedDistanceMatrix& matrix, std::size_t depth);

/// correct(k, fold) for k = 1..depth, row-major by k.
class AccuracyMatrix {
 public:
  AccuracyMatrix() = default;
  AccuracyMatrix(std::size_t depth, std::vector<std::size_t> fold_sizes);

  std::size_t depth() const noexcept { return depth_; }
  std::size_t num_folds() const noexcept { return fold_sizes_.size(); }
  const std::vector<std::size_t>& fold_sizes() const noexcept { return fold_sizes_; }

  /// k is 1-based.
  std::uint64_t correct(std::size_t k, std::size_t fold) const noexcept {
    return correct_[(k - 1) * fold_sizes_.size() + fold];
  }
  std::uint64_t& correct(std::size_t k, std::size_t fold) noexcept {
    return correct_[(k - 1) * fold_sizes_.size() + fold];
  }
  std::span<const std::uint64_t> row(std::size_t k) const noexcept {
    return {correct_.data() + (k - 1) * fold_sizes_.size(), fold_sizes_.size()};
  }
  double accuracy(std::size_t k, std::size_t fold) const noexcept {
    return static_cast<double>(correct(k, fold)) / static_cast<double>(fold_sizes_[fold]);
  }

  friend bool operator==(const AccuracyMatrix&, const AccuracyMatrix&) = default;

 private:
  std::size_t depth_ = 0;
  std::vector<std::size_t> fold_sizes_;
  std::vector<std::uint64_t> correct_;
};

struct SweepOptions {
  TieBreakPolicy policy = TieBreakPolicy::kSmallestCode;
  std::size_t depth = 0;  // 0 means k_max
  unsigned threads = 0;
};

/// Walks every row's sorted neighbours once, k = 1, 2, ..., depth, updating the
/// running vote and scoring each prediction against truth into
/// correct(k, fold_of[r]). Counters are never reset between k values.
AccuracyMatrix sweep(const SortedDistanceMatrix& matrix, const FoldAssignment& folds,
                     std::span<const ClassCode> truth, const SweepOptions& options = {});

struct CurvePoint {
  std::size_t k = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population std over folds
};

struct PhaseTiming {
  double distance_seconds = 0.0;
  double sort_seconds = 0.0;
  double sweep_seconds = 0.0;
  double total_seconds = 0.0;
};

struct KSearchReport {
  std::vector<std::size_t> best_k_per_fold;
  std::size_t k_star = 0;
  std::size_t k_max = 0;
  std::vector<CurvePoint> curve;
  std::vector<std::size_t> evaluated_k;
  PhaseTiming timing;
};

/// Picks each fold's best k (smallest on ties) among `evaluated_k`, whose
/// correct counts are given row by row in `correct_rows`, and averages them
/// into k*, rounding half up and clamping to [1, k_max].
KSearchReport select_k_from(std::span<const std::size_t> evaluated_k,
                            std::span<const std::vector<std::uint64_t>> correct_rows,
                            std::span<const std::size_t> fold_sizes, std::size_t k_max);

/// Same, over every k in the matrix.
KSearchReport select_k(const AccuracyMatrix& acc);

/// Writes "k,mean_accuracy,std_accuracy" with six decimals per value.
void accuracy_curve_export(const KSearchReport& report, const std::filesystem::path& path);

}  // namespace kscan
