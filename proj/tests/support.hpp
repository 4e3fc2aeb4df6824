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

// Test-only helpers: random instance generation and brute-force references
// that share no code with the library's matrix builder or sweep.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <tuple>
#include <vector>

#include "kscan/dataset.hpp"
#include "kscan/distance.hpp"
#include "kscan/ksweep.hpp"

namespace kscan::testing {

struct Instance {
  Dataset dataset;
  FoldAssignment folds;
};

/// Random labelled data. With `lattice` the features are small integers so
/// exact distance ties (and vote ties) are common.
inline Instance random_instance(std::mt19937_64& gen, std::size_t n, std::size_t d, std::size_t s, std::size_t f,
                                bool lattice) {
  std::vector<double> values(n * d);
  std::uniform_int_distribution<int> grid(0, 3);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : values) v = lattice ? grid(gen) : normal(gen);
  std::vector<ClassCode> labels(n);
  for (std::size_t r = 0; r < n; ++r) labels[r] = static_cast<ClassCode>(r < s ? r : gen() % s);
  std::shuffle(labels.begin(), labels.end(), gen);
  std::vector<std::string> names;
  for (std::size_t c = 0; c < s; ++c) names.push_back("L" + std::to_string(c));
  Dataset ds(FeatureMatrix(n, d, std::move(values)), std::move(labels), std::move(names));
  FoldAssignment folds = stratified_folds(ds, f, gen());
  return {std::move(ds), std::move(folds)};
}

/// Straight formula, no shared code with pairwise_distance.
inline double reference_distance(std::span<const double> a, std::span<const double> b, Metric m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = std::fabs(a[i] - b[i]);
    if (m == Metric::kEuclidean) acc += diff * diff;
    if (m == Metric::kManhattan) acc += diff;
    if (m == Metric::kChebyshev) acc = std::max(acc, diff);
  }
  return m == Metric::kEuclidean ? std::sqrt(acc) : acc;
}

/// Masked neighbour list of row r sorted by (distance, source).
inline std::vector<std::tuple<double, std::uint32_t, ClassCode>> reference_row(const Dataset& ds,
                                                                              const FoldAssignment& folds,
                                                                              std::size_t r, Metric m) {
  std::vector<std::tuple<double, std::uint32_t, ClassCode>> out;
  for (std::size_t j = 0; j < ds.size(); ++j) {
    if (folds.fold_of[j] == folds.fold_of[r]) continue;
    out.emplace_back(reference_distance(ds.features().row(r), ds.features().row(j), m), static_cast<std::uint32_t>(j),
                     ds.labels()[j]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// A(k, fold) by enumerating each row's neighbour list from scratch at every
/// k and voting with a plain scan.
inline std::vector<std::vector<std::uint64_t>> reference_accuracy(const Dataset& ds, const FoldAssignment& folds,
                                                                  Metric m, TieBreakPolicy policy) {
  const std::size_t k_max = ds.size() - folds.max_fold_size();
  std::vector<std::vector<std::uint64_t>> a(k_max, std::vector<std::uint64_t>(folds.num_folds(), 0));
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto row = reference_row(ds, folds, r, m);
    for (std::size_t k = 1; k <= k_max; ++k) {
      std::vector<int> count(ds.num_classes(), 0);
      std::vector<double> dist(ds.num_classes(), 0.0);
      for (std::size_t j = 0; j < k; ++j) {
        ++count[std::get<2>(row[j])];
        dist[std::get<2>(row[j])] += std::get<0>(row[j]);
      }
      std::size_t best = 0;
      for (std::size_t c = 1; c < count.size(); ++c) {
        const bool more = count[c] > count[best];
        const bool closer = count[c] == count[best] && policy == TieBreakPolicy::kShadowMin && dist[c] < dist[best];
        if (more || closer) best = c;
      }
      if (best == ds.labels()[r]) ++a[k - 1][folds.fold_of[r]];
    }
  }
  return a;
}

inline std::vector<std::vector<std::uint64_t>> rows_of(const AccuracyMatrix& acc) {
  std::vector<std::vector<std::uint64_t>> out;
  for (std::size_t k = 1; k <= acc.depth(); ++k) out.emplace_back(acc.row(k).begin(), acc.row(k).end());
  return out;
}

/// The four-point instance: x = 0, 1, 2, 10; labels 0, 0, 1, 1; folds 0, 1, 0, 1.
inline Instance toy_instance() {
  Dataset ds(FeatureMatrix(4, 1, {0.0, 1.0, 2.0, 10.0}), {0, 0, 1, 1}, {"A", "B"});
  return {std::move(ds), make_folds({0, 1, 0, 1}, 2)};
}

}  // namespace kscan::testing
