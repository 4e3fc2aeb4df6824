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

#include "kscan/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "kscan/error.hpp"
#include "kscan/parallel.hpp"

namespace kscan {

namespace {

struct Candidate {
  double distance;
  std::uint32_t index;
};

bool candidate_less(const Candidate& a, const Candidate& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

// Votes over the first k candidates, which must be in ascending order when the
// policy reads summed distances.
ClassCode vote(std::span<const Candidate> nearest, std::span<const ClassCode> train_labels, std::size_t num_classes,
               TieBreakPolicy policy) {
  std::vector<std::uint32_t> counts(num_classes, 0);
  std::vector<double> shadow(num_classes, 0.0);
  for (const auto& c : nearest) {
    const ClassCode label = train_labels[c.index];
    ++counts[label];
    shadow[label] += c.distance;
  }
  return classify_at_k(counts, shadow, policy);
}

struct FoldSplit {
  FeatureMatrix train;
  std::vector<ClassCode> train_labels;
  std::vector<std::size_t> queries;
};

FoldSplit split_fold(const Dataset& dataset, const FoldAssignment& folds, FoldIndex held_out) {
  FoldSplit split;
  std::vector<double> values;
  const std::size_t d = dataset.dims();
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    if (folds.fold_of[r] == held_out) {
      split.queries.push_back(r);
      continue;
    }
    const auto row = dataset.features().row(r);
    values.insert(values.end(), row.begin(), row.end());
    split.train_labels.push_back(dataset.labels()[r]);
  }
  split.train = FeatureMatrix(split.train_labels.size(), d, std::move(values));
  return split;
}

void check_folds(const Dataset& dataset, const FoldAssignment& folds) {
  if (folds.size() != dataset.size()) {
    throw Error(ErrorCode::kInconsistentInputs, "fold assignment does not match dataset size");
  }
}

}  // namespace

std::string_view to_string(ScheduleMode mode) { return mode == ScheduleMode::kFull ? "full" : "logarithmic"; }

KSchedule full_schedule(std::size_t k_max) {
  KSchedule s;
  s.mode = ScheduleMode::kFull;
  for (std::size_t k = 1; k <= k_max; ++k) s.values.push_back(k);
  return s;
}

KSchedule logarithmic_schedule(std::size_t k_max) {
  KSchedule s;
  s.mode = ScheduleMode::kLogarithmic;
  if (k_max == 0) return s;
  for (std::size_t k = 1; k <= 8 && k <= k_max; ++k) s.values.push_back(k);
  if (10 <= k_max) s.values.push_back(10);
  for (std::size_t k = 100; k <= k_max; k += 100) s.values.push_back(k);
  if (s.values.back() != k_max) s.values.push_back(k_max);
  return s;
}

std::size_t fold_k_max(const FoldAssignment& folds) { return folds.size() - folds.max_fold_size(); }

ClassCode knn_classify(const FeatureMatrix& train_features, std::span<const ClassCode> train_labels,
                       std::size_t num_classes, std::span<const double> query, std::size_t k, Metric metric,
                       TieBreakPolicy policy) {
  const std::size_t m = train_features.rows();
  if (train_labels.size() != m) throw Error(ErrorCode::kInconsistentInputs, "train labels and rows differ");
  if (query.size() != train_features.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "query has " + std::to_string(query.size()) + " features, train has " +
                                                   std::to_string(train_features.cols()));
  }
  if (k == 0 || k > m) {
    throw Error(ErrorCode::kKTooLarge, "k=" + std::to_string(k) + " with " + std::to_string(m) + " training rows");
  }
  std::vector<Candidate> all(m);
  for (std::size_t i = 0; i < m; ++i) {
    all[i] = {pairwise_distance(query, train_features.row(i), metric), static_cast<std::uint32_t>(i)};
  }
  const auto kth = all.begin() + static_cast<std::ptrdiff_t>(k);
  std::nth_element(all.begin(), kth - 1, all.end(), candidate_less);
  if (policy == TieBreakPolicy::kShadowMin) std::sort(all.begin(), kth, candidate_less);
  return vote(std::span(all).first(k), train_labels, num_classes, policy);
}

std::vector<std::uint64_t> cross_validate(const Dataset& dataset, const FoldAssignment& folds, std::size_t k,
                                          const OracleOptions& options) {
  check_folds(dataset, folds);
  const std::size_t k_max = fold_k_max(folds);
  if (k == 0 || k > k_max) {
    throw Error(ErrorCode::kKTooLarge, "k=" + std::to_string(k) + " outside 1.." + std::to_string(k_max));
  }
  const unsigned workers = resolve_threads(options.threads);
  std::vector<std::uint64_t> correct(folds.num_folds(), 0);
  for (FoldIndex fold = 0; fold < folds.num_folds(); ++fold) {
    const FoldSplit split = split_fold(dataset, folds, fold);
    std::vector<std::uint64_t> hits(workers, 0);
    parallel_chunks(split.queries.size(), workers, [&](std::size_t first, std::size_t last, unsigned w) {
      for (std::size_t q = first; q < last; ++q) {
        const std::size_t r = split.queries[q];
        const ClassCode predicted = knn_classify(split.train, split.train_labels, dataset.num_classes(),
                                                 dataset.features().row(r), k, options.metric, options.policy);
        if (predicted == dataset.labels()[r]) ++hits[w];
      }
    });
    for (std::uint64_t h : hits) correct[fold] += h;
  }
  return correct;
}

KSearchReport naive_search(const Dataset& dataset, const FoldAssignment& folds, const KSchedule& schedule,
                           const OracleOptions& options, std::vector<std::vector<std::uint64_t>>* correct) {
  check_folds(dataset, folds);
  const std::size_t k_max = fold_k_max(folds);
  const auto& ks = schedule.values;
  if (ks.empty() || ks.front() < 1 || ks.back() > k_max || !std::is_sorted(ks.begin(), ks.end()) ||
      std::adjacent_find(ks.begin(), ks.end()) != ks.end()) {
    throw Error(ErrorCode::kKTooLarge, "schedule must be strictly ascending within 1.." + std::to_string(k_max));
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<std::uint64_t>> rows(ks.size(), std::vector<std::uint64_t>(folds.num_folds(), 0));

  if (!options.cache_per_fold) {
    for (std::size_t j = 0; j < ks.size(); ++j) rows[j] = cross_validate(dataset, folds, ks[j], options);
  } else {
    const unsigned workers = resolve_threads(options.threads);
    for (FoldIndex fold = 0; fold < folds.num_folds(); ++fold) {
      const FoldSplit split = split_fold(dataset, folds, fold);
      const std::size_t m = split.train.rows();
      std::vector<std::vector<std::uint64_t>> hits(workers, std::vector<std::uint64_t>(ks.size(), 0));
      parallel_chunks(split.queries.size(), workers, [&](std::size_t first, std::size_t last, unsigned w) {
        std::vector<Candidate> sorted(m);
        for (std::size_t q = first; q < last; ++q) {
          const std::size_t r = split.queries[q];
          const auto query = dataset.features().row(r);
          for (std::size_t i = 0; i < m; ++i) {
            sorted[i] = {pairwise_distance(query, split.train.row(i), options.metric), static_cast<std::uint32_t>(i)};
          }
          std::sort(sorted.begin(), sorted.end(), candidate_less);
          for (std::size_t j = 0; j < ks.size(); ++j) {
            const ClassCode predicted =
                vote(std::span(sorted).first(ks[j]), split.train_labels, dataset.num_classes(), options.policy);
            if (predicted == dataset.labels()[r]) ++hits[w][j];
          }
        }
      });
      for (const auto& h : hits) {
        for (std::size_t j = 0; j < ks.size(); ++j) rows[j][fold] += h[j];
      }
    }
  }

  KSearchReport report = select_k_from(ks, rows, folds.fold_sizes, k_max);
  report.timing.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (correct) *correct = std::move(rows);
  return report;
}

}  // namespace kscan
