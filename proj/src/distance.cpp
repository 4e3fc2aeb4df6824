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

#include "kscan/distance.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "kscan/error.hpp"
#include "kscan/parallel.hpp"

namespace kscan {

namespace {

constexpr std::array<char, 8> kMagic = {'K', 'S', 'C', 'A', 'N', 'S', 'D', 'M'};
constexpr std::size_t kHeaderBytes = 8 + 4 * 8 + 2 * 4;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  std::array<unsigned char, sizeof(U)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw Error(ErrorCode::kIo, "truncated matrix dump");
  }
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kEuclidean: return "euclidean";
    case Metric::kManhattan: return "manhattan";
    case Metric::kChebyshev: return "chebyshev";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::kEuclidean;
  if (name == "manhattan") return Metric::kManhattan;
  if (name == "chebyshev") return Metric::kChebyshev;
  throw Error(ErrorCode::kUsage, "unknown metric '" + std::string(name) + "'");
}

double pairwise_distance(std::span<const double> a, std::span<const double> b, Metric metric) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "vectors of length " + std::to_string(a.size()) + " and " +
                                                   std::to_string(b.size()));
  }
  double acc = 0.0;
  switch (metric) {
    case Metric::kEuclidean:
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
      }
      return std::sqrt(acc);
    case Metric::kManhattan:
      for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
      return acc;
    case Metric::kChebyshev:
      for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
      return acc;
  }
  return acc;
}

std::size_t footprint_overhead(std::size_t n) { return kHeaderBytes + (n + 1) * sizeof(std::size_t); }

std::size_t estimate_footprint(std::span<const std::size_t> fold_sizes) {
  std::size_t n = 0;
  for (std::size_t s : fold_sizes) n += s;
  std::size_t entries = 0;
  for (std::size_t s : fold_sizes) entries += s * (n - s);
  return entries * sizeof(NeighborEntry) + footprint_overhead(n);
}

std::size_t estimate_footprint(std::size_t n, std::size_t folds) {
  folds = std::clamp<std::size_t>(folds, 1, std::max<std::size_t>(n, 1));
  std::vector<std::size_t> sizes(folds, n / folds);
  for (std::size_t i = 0; i < n % folds; ++i) ++sizes[i];
  return estimate_footprint(sizes);
}

SortedDistanceMatrix::SortedDistanceMatrix(std::vector<NeighborEntry> entries, std::vector<std::size_t> offsets,
                                           std::size_t num_folds, std::size_t num_classes, Metric metric)
    : entries_(std::move(entries)),
      offsets_(std::move(offsets)),
      num_folds_(num_folds),
      num_classes_(num_classes),
      metric_(metric) {
  if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != entries_.size() ||
      !std::is_sorted(offsets_.begin(), offsets_.end())) {
    throw Error(ErrorCode::kInconsistentInputs, "malformed row offsets");
  }
  k_max_ = std::numeric_limits<std::size_t>::max();
  for (std::size_t r = 0; r + 1 < offsets_.size(); ++r) k_max_ = std::min(k_max_, valid_len(r));
  if (size() == 0) k_max_ = 0;
}

std::size_t SortedDistanceMatrix::footprint() const noexcept {
  return entries_.size() * sizeof(NeighborEntry) + footprint_overhead(size());
}

void SortedDistanceMatrix::write_binary(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint64_t>(out, size());
  put_le<std::uint64_t>(out, num_folds_);
  put_le<std::uint64_t>(out, k_max_);
  put_le<std::uint64_t>(out, num_classes_);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(metric_));
  put_le<std::uint32_t>(out, 0);
  for (std::size_t r = 0; r < size(); ++r) {
    put_le<std::uint64_t>(out, valid_len(r));
    for (const auto& e : row(r)) {
      put_le<double>(out, e.distance);
      put_le<std::uint32_t>(out, e.label);
      put_le<std::uint32_t>(out, e.source);
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

SortedDistanceMatrix SortedDistanceMatrix::read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error(ErrorCode::kIo, path.string() + " is not a sorted matrix dump");
  }
  const auto n = get_le<std::uint64_t>(in);
  const auto f = get_le<std::uint64_t>(in);
  const auto k_max = get_le<std::uint64_t>(in);
  const auto s = get_le<std::uint64_t>(in);
  const auto metric = get_le<std::uint32_t>(in);
  get_le<std::uint32_t>(in);
  if (metric > static_cast<std::uint32_t>(Metric::kChebyshev)) throw Error(ErrorCode::kIo, "bad metric tag");

  std::vector<std::size_t> offsets{0};
  std::vector<NeighborEntry> entries;
  for (std::uint64_t r = 0; r < n; ++r) {
    const auto len = get_le<std::uint64_t>(in);
    for (std::uint64_t j = 0; j < len; ++j) {
      NeighborEntry e{};
      e.distance = get_le<double>(in);
      e.label = get_le<std::uint32_t>(in);
      e.source = get_le<std::uint32_t>(in);
      entries.push_back(e);
    }
    offsets.push_back(entries.size());
  }
  SortedDistanceMatrix m(std::move(entries), std::move(offsets), f, s, static_cast<Metric>(metric));
  if (m.k_max() != k_max) throw Error(ErrorCode::kIo, "k_max in header disagrees with row lengths");
  return m;
}

SortedDistanceMatrix build_sorted_matrix(const Dataset& dataset, const FoldAssignment& folds,
                                         const BuildOptions& options, BuildTiming* timing) {
  const std::size_t n = dataset.size();
  if (folds.size() != n) {
    throw Error(ErrorCode::kInconsistentInputs, "inconsistent folds: " + std::to_string(folds.size()) +
                                                    " assignments for " + std::to_string(n) + " rows");
  }
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kBadParams, "row ids must fit in 32 bits");
  }
  const std::size_t f = folds.num_folds();
  {
    std::vector<std::size_t> recount(f, 0);
    for (FoldIndex i : folds.fold_of) {
      if (i >= f) throw Error(ErrorCode::kInconsistentInputs, "inconsistent folds: index out of range");
      ++recount[i];
    }
    if (recount != folds.fold_sizes) throw Error(ErrorCode::kInconsistentInputs, "inconsistent folds: sizes");
  }
  const std::size_t required = estimate_footprint(folds.fold_sizes);
  if (required > options.memory_budget) {
    throw Error(ErrorCode::kMemoryBudgetExceeded, "sorted matrix needs " + std::to_string(required) +
                                                      " bytes, budget is " + std::to_string(options.memory_budget));
  }

  const auto& fold_of = folds.fold_of;
  const auto labels = dataset.labels();
  const auto& features = dataset.features();

  std::vector<std::size_t> offsets(n + 1, 0);
  for (std::size_t r = 0; r < n; ++r) offsets[r + 1] = offsets[r] + n - folds.fold_sizes[fold_of[r]];
  std::vector<NeighborEntry> entries(offsets[n]);

  const unsigned workers = resolve_threads(options.threads);
  auto start = Clock::now();

  // Row a owns the pairs (a, b > a). Split rows so each worker gets about the
  // same number of pairs.
  std::vector<std::size_t> bounds{0};
  {
    const std::size_t total_pairs = n * (n - 1) / 2;
    std::size_t acc = 0;
    for (std::size_t a = 0; a < n && bounds.size() < workers; ++a) {
      acc += n - 1 - a;
      if (acc * workers >= total_pairs * bounds.size()) bounds.push_back(a + 1);
    }
    while (bounds.size() <= workers) bounds.push_back(n);
    bounds.back() = n;
  }

  parallel_chunks(workers, workers, [&](std::size_t wb, std::size_t we, unsigned) {
    for (std::size_t w = wb; w < we; ++w) {
      const std::size_t first = bounds[w];
      const std::size_t last = bounds[w + 1];
      if (first >= last) continue;
      // before[F] = number of rows < a that sit in fold F.
      std::vector<std::size_t> before(f, 0);
      for (std::size_t r = 0; r < first; ++r) ++before[fold_of[r]];
      for (std::size_t a = first; a < last; ++a) {
        const FoldIndex fa = fold_of[a];
        const auto row_a = features.row(a);
        // Same-fold rows below b, for placing b within row a.
        std::size_t same_below = before[fa] + 1;
        for (std::size_t b = a + 1; b < n; ++b) {
          const FoldIndex fb = fold_of[b];
          if (fb == fa) {
            ++same_below;
            continue;
          }
          const double d = pairwise_distance(row_a, features.row(b), options.metric);
          entries[offsets[a] + b - same_below] = {d, labels[b], static_cast<std::uint32_t>(b)};
          entries[offsets[b] + a - before[fb]] = {d, labels[a], static_cast<std::uint32_t>(a)};
        }
        ++before[fa];
      }
    }
  });
  if (timing) timing->distance_seconds = seconds_since(start);

  start = Clock::now();
  parallel_chunks(n, workers, [&](std::size_t first, std::size_t last, unsigned) {
    for (std::size_t r = first; r < last; ++r) {
      std::sort(entries.begin() + static_cast<std::ptrdiff_t>(offsets[r]),
                entries.begin() + static_cast<std::ptrdiff_t>(offsets[r + 1]), neighbor_less);
    }
  });
  if (timing) timing->sort_seconds = seconds_since(start);

  return SortedDistanceMatrix(std::move(entries), std::move(offsets), f, dataset.num_classes(), options.metric);
}

}  // namespace kscan
