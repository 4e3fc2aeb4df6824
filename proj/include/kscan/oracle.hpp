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
#include <span>
#include <string_view>
#include <vector>

#include "kscan/dataset.hpp"
#include "kscan/distance.hpp"
#include "kscan/ksweep.hpp"

namespace kscan {

enum class ScheduleMode { kFull, kLogarithmic };

std::string_view to_string(ScheduleMode mode);

struct KSchedule {
  std::vector<std::size_t> values;
  ScheduleMode mode = ScheduleMode::kFull;
};

/// 1..k_max.
KSchedule full_schedule(std::size_t k_max);

/// {1..8} + {10} + multiples of 100 up to k_max + {k_max}, clipped to
/// [1, k_max], ascending and without duplicates.
KSchedule logarithmic_schedule(std::size_t k_max);

/// Brute-force kNN: distances to every training row, k smallest by
/// (distance, training index), vote with `policy`.
ClassCode knn_classify(const FeatureMatrix& train_features, std::span<const ClassCode> train_labels,
                       std::size_t num_classes, std::span<const double> query, std::size_t k, Metric metric,
                       TieBreakPolicy policy);

struct OracleOptions {
  Metric metric = Metric::kEuclidean;
  TieBreakPolicy policy = TieBreakPolicy::kSmallestCode;
  unsigned threads = 0;
  // Sort each query's training distances once per fold and reuse them for
  // every k in a search. Outputs are unchanged; only the cost model differs.
  bool cache_per_fold = false;
};

/// n - largest fold: the deepest k every held-out row can use.
std::size_t fold_k_max(const FoldAssignment& folds);

/// For each fold i: trains on the other folds, classifies fold i at k and
/// counts hits. Distances are recomputed from scratch on every call.
std::vector<std::uint64_t> cross_validate(const Dataset& dataset, const FoldAssignment& folds, std::size_t k,
                                          const OracleOptions& options = {});

/// cross_validate at every k of the schedule, summarised like select_k.
/// timing.total_seconds covers the whole search. When `correct` is given it
/// receives the per-fold hit counts, one row per scheduled k.
KSearchReport naive_search(const Dataset& dataset, const FoldAssignment& folds, const KSchedule& schedule,
                           const OracleOptions& options = {},
                           std::vector<std::vector<std::uint64_t>>* correct = nullptr);

}  // namespace kscan
