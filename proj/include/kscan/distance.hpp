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
#include <string>
#include <string_view>
#include <vector>

#include "kscan/dataset.hpp"

namespace kscan {

enum class Metric : std::uint32_t { kEuclidean = 0, kManhattan = 1, kChebyshev = 2 };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);

/// Terms are accumulated in feature-index order; euclidean takes the square
/// root of the summed squares. Throws DimensionMismatch on unequal lengths.
double pairwise_distance(std::span<const double> a, std::span<const double> b, Metric metric);

/// One neighbour of a row: distance to it, its label, and its row id.
struct NeighborEntry {
  double distance;
  ClassCode label;
  std::uint32_t source;

  friend bool operator==(const NeighborEntry&, const NeighborEntry&) = default;
};

/// (distance, source) ascending; the single ordering rule for neighbour lists.
constexpr bool neighbor_less(const NeighborEntry& a, const NeighborEntry& b) noexcept {
  return a.distance < b.distance || (a.distance == b.distance && a.source < b.source);
}

/// Fixed part of the footprint: header plus per-row offset table.
std::size_t footprint_overhead(std::size_t n);

/// Bytes for a matrix with these fold sizes (exact).
std::size_t estimate_footprint(std::span<const std::size_t> fold_sizes);

/// Bytes for n rows in f folds dealt as evenly as possible.
std::size_t estimate_footprint(std::size_t n, std::size_t folds);

/// Rows of cross-fold neighbours, each sorted by neighbor_less. Rows are
/// stored back to back; same-fold rows (including the row itself) are never
/// present.
class SortedDistanceMatrix {
 public:
  SortedDistanceMatrix() = default;
  SortedDistanceMatrix(std::vector<NeighborEntry> entries, std::vector<std::size_t> offsets,
                       std::size_t num_folds, std::size_t num_classes, Metric metric);

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_folds() const noexcept { return num_folds_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  Metric metric() const noexcept { return metric_; }
  std::size_t k_max() const noexcept { return k_max_; }

  std::span<const NeighborEntry> row(std::size_t r) const noexcept {
    return {entries_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }
  std::size_t valid_len(std::size_t r) const noexcept { return offsets_[r + 1] - offsets_[r]; }
  std::size_t footprint() const noexcept;

  /// Little-endian dump:
  ///   8 bytes  magic "KSCANSDM"
  ///   u64 n, u64 f, u64 k_max, u64 s, u32 metric, u32 reserved (0)
  ///   per row: u64 valid_len, then valid_len x (f64 distance, u32 label, u32 source)
  void write_binary(const std::filesystem::path& path) const;
  static SortedDistanceMatrix read_binary(const std::filesystem::path& path);

  friend bool operator==(const SortedDistanceMatrix&, const SortedDistanceMatrix&) = default;

 private:
  std::vector<NeighborEntry> entries_;
  std::vector<std::size_t> offsets_;
  std::size_t num_folds_ = 0;
  std::size_t num_classes_ = 0;
  Metric metric_ = Metric::kEuclidean;
  std::size_t k_max_ = 0;
};

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{4} << 30;

struct BuildOptions {
  Metric metric = Metric::kEuclidean;
  std::size_t memory_budget = kDefaultMemoryBudget;
  unsigned threads = 0;
};

struct BuildTiming {
  double distance_seconds = 0.0;
  double sort_seconds = 0.0;
};

/// Computes each cross-fold pair once, mirrors it into both rows, then sorts
/// every row. Output does not depend on the thread count.
SortedDistanceMatrix build_sorted_matrix(const Dataset& dataset, const FoldAssignment& folds,
                                         const BuildOptions& options = {}, BuildTiming* timing = nullptr);

}  // namespace kscan
