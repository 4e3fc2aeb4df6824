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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "kscan/error.hpp"
#include "kscan/ksweep.hpp"
#include "kscan/report.hpp"
#include "support.hpp"

using namespace kscan;
using kscan::testing::random_instance;
using kscan::testing::reference_accuracy;
using kscan::testing::rows_of;
using kscan::testing::toy_instance;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

AccuracyMatrix matrix_from(std::vector<std::vector<std::uint64_t>> rows, std::vector<std::size_t> fold_sizes) {
  AccuracyMatrix acc(rows.size(), std::move(fold_sizes));
  for (std::size_t k = 1; k <= rows.size(); ++k) {
    for (std::size_t i = 0; i < rows[k - 1].size(); ++i) acc.correct(k, i) = rows[k - 1][i];
  }
  return acc;
}

using U = std::vector<std::uint32_t>;
using D = std::vector<double>;

}  // namespace

TEST_CASE("classify_at_k") {
  CHECK(classify_at_k(U{2, 1}, D{5.0, 0.1}, TieBreakPolicy::kSmallestCode) == 0);
  CHECK(classify_at_k(U{2, 1}, D{5.0, 0.1}, TieBreakPolicy::kShadowMin) == 0);
  CHECK(classify_at_k(U{1, 1}, D{10.0, 1.0}, TieBreakPolicy::kSmallestCode) == 0);
  CHECK(classify_at_k(U{1, 1}, D{10.0, 1.0}, TieBreakPolicy::kShadowMin) == 1);
  // Equal count and equal shadow: lowest code.
  CHECK(classify_at_k(U{0, 2, 2}, D{0.0, 3.0, 3.0}, TieBreakPolicy::kShadowMin) == 1);
  CHECK(classify_at_k(U{0, 0, 3}, D{0.0, 0.0, 1.0}, TieBreakPolicy::kSmallestCode) == 2);
  CHECK_THROWS_AS(classify_at_k(U{0, 0}, D{0.0, 0.0}, TieBreakPolicy::kSmallestCode), Error);
}

TEST_CASE("toy instance accuracy matrix, frozen from the brute-force reference") {
  const auto [ds, folds] = toy_instance();
  const auto m = build_sorted_matrix(ds, folds);

  // Hand trace, smallest_code. Row 2 (x=2, label 1) sees x=1 (label 0) first
  // and ties 1:1 at k=2, so it is never right; row 3 ties 1:1 at k=2 too.
  const std::vector<std::vector<std::uint64_t>> by_code = {{1, 2}, {1, 1}};
  CHECK(reference_accuracy(ds, folds, Metric::kEuclidean, TieBreakPolicy::kSmallestCode) == by_code);
  CHECK(rows_of(sweep(m, folds, ds.labels())) == by_code);

  // shadow_min rescues row 3 at k=2 (label 1 at distance 8 beats label 0 at 10).
  const std::vector<std::vector<std::uint64_t>> by_shadow = {{1, 2}, {1, 2}};
  CHECK(reference_accuracy(ds, folds, Metric::kEuclidean, TieBreakPolicy::kShadowMin) == by_shadow);
  CHECK(rows_of(sweep(m, folds, ds.labels(), {TieBreakPolicy::kShadowMin})) == by_shadow);

  const auto report = select_k(sweep(m, folds, ds.labels()));
  CHECK(report.best_k_per_fold == std::vector<std::size_t>{1, 1});
  CHECK(report.k_star == 1);
}

TEST_CASE("when every neighbour shares the truth label, every row is right") {
  const auto [ds, folds] = toy_instance();
  const auto m = build_sorted_matrix(ds, folds);
  std::vector<NeighborEntry> entries;
  std::vector<std::size_t> offsets{0};
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (auto e : m.row(r)) {
      e.label = 0;
      entries.push_back(e);
    }
    offsets.push_back(entries.size());
  }
  const SortedDistanceMatrix one_class(entries, offsets, 2, 1, Metric::kEuclidean);
  const std::vector<ClassCode> truth(m.size(), 0);
  const auto acc = sweep(one_class, folds, truth);
  for (std::size_t k = 1; k <= acc.depth(); ++k) {
    for (std::size_t i = 0; i < 2; ++i) CHECK(acc.correct(k, i) == folds.fold_sizes[i]);
  }
}

TEST_CASE("two rows, two folds: one neighbour") {
  Dataset ds(FeatureMatrix(2, 1, {0.0, 1.0}), {0, 1}, {"a", "b"});
  const auto folds = make_folds({0, 1}, 2);
  const auto m = build_sorted_matrix(ds, folds);
  CHECK(m.k_max() == 1);
  const auto acc = sweep(m, folds, ds.labels());
  CHECK(acc.depth() == 1);
  CHECK(acc.num_folds() == 2);
  // Each row predicts the other's label, which is wrong.
  CHECK(acc.correct(1, 0) == 0);
  CHECK(acc.correct(1, 1) == 0);
}

TEST_CASE("sweep input validation") {
  const auto [ds, folds] = toy_instance();
  const auto m = build_sorted_matrix(ds, folds);
  std::vector<ClassCode> short_truth = {0, 0, 1};
  CHECK_THROWS_AS(sweep(m, folds, short_truth), Error);
  CHECK_THROWS_AS(sweep(m, folds, ds.labels(), {TieBreakPolicy::kSmallestCode, 3}), Error);
}

TEST_CASE("property: sweep matches brute-force enumeration") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 6 + gen() % 60;
    const std::size_t f = 2 + gen() % 4;
    const auto policy = static_cast<TieBreakPolicy>(trial % 2);
    const Metric metric = static_cast<Metric>(gen() % 3);
    const auto inst = random_instance(gen, n, 1 + gen() % 3, 2 + gen() % 3, f, trial % 3 != 0);
    const auto m = build_sorted_matrix(inst.dataset, inst.folds, {metric, kDefaultMemoryBudget, 1});
    const auto acc = sweep(m, inst.folds, inst.dataset.labels(), {policy, 0, 1});
    CHECK(rows_of(acc) == reference_accuracy(inst.dataset, inst.folds, metric, policy));
  }
}

TEST_CASE("property: truncated sweeps are prefixes of the full sweep") {
  std::mt19937_64 gen(32);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance(gen, 20 + gen() % 60, 2, 3, 3, true);
    const auto m = build_sorted_matrix(inst.dataset, inst.folds);
    const auto full = sweep(m, inst.folds, inst.dataset.labels());
    const std::size_t depth = 1 + gen() % m.k_max();
    const auto part = sweep(m, inst.folds, inst.dataset.labels(), {TieBreakPolicy::kSmallestCode, depth});
    REQUIRE(part.depth() == depth);
    for (std::size_t k = 1; k <= depth; ++k) {
      CHECK(std::equal(part.row(k).begin(), part.row(k).end(), full.row(k).begin()));
    }
  }
}

TEST_CASE("property: counts are conserved and shadows grow") {
  std::mt19937_64 gen(33);
  const auto inst = random_instance(gen, 47, 2, 4, 5, false);
  const auto m = build_sorted_matrix(inst.dataset, inst.folds);
  CountState prev = accumulate_counts(m, 0);
  for (std::size_t k = 1; k <= m.valid_len(0) + 2; ++k) {
    const CountState st = accumulate_counts(m, k);
    for (std::size_t r = 0; r < m.size(); ++r) {
      std::uint64_t sum = 0;
      for (auto c : st.counts_row(r)) sum += c;
      CHECK(sum == std::min(k, m.valid_len(r)));
      for (std::size_t c = 0; c < st.classes; ++c) {
        CHECK(st.shadow_row(r)[c] >= prev.shadow_row(r)[c]);
        double expect = 0.0;
        for (std::size_t j = 0; j < std::min(k, m.valid_len(r)); ++j) {
          if (m.row(r)[j].label == c) expect += m.row(r)[j].distance;
        }
        CHECK(st.shadow_row(r)[c] == expect);
      }
    }
    prev = st;
  }
}

TEST_CASE("property: without count ties the policy does not matter") {
  // Continuous features and two classes at odd k: a 2-class vote over an odd
  // number of neighbours can never tie.
  std::mt19937_64 gen(34);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = random_instance(gen, 40, 3, 2, 4, false);
    const auto m = build_sorted_matrix(inst.dataset, inst.folds);
    const auto a = sweep(m, inst.folds, inst.dataset.labels(), {TieBreakPolicy::kSmallestCode});
    const auto b = sweep(m, inst.folds, inst.dataset.labels(), {TieBreakPolicy::kShadowMin});
    for (std::size_t k = 1; k <= a.depth(); k += 2) {
      CHECK(std::equal(a.row(k).begin(), a.row(k).end(), b.row(k).begin()));
    }
  }
}

TEST_CASE("sweep is independent of thread count") {
  std::mt19937_64 gen(35);
  for (std::size_t f : {3u, 12u}) {
    const auto inst = random_instance(gen, 90, 2, 3, f, true);
    const auto m = build_sorted_matrix(inst.dataset, inst.folds);
    const auto one = sweep(m, inst.folds, inst.dataset.labels(), {TieBreakPolicy::kShadowMin, 0, 1});
    for (unsigned t : {2u, 5u, 16u}) {
      CHECK(sweep(m, inst.folds, inst.dataset.labels(), {TieBreakPolicy::kShadowMin, 0, t}) == one);
    }
  }
}

TEST_CASE("select_k picks the smallest best k per fold and rounds the mean half up") {
  const auto report = select_k(matrix_from({{2, 1}, {2, 2}}, {2, 2}));
  CHECK(report.best_k_per_fold == std::vector<std::size_t>{1, 2});
  CHECK(report.k_star == 2);
  CHECK(report.evaluated_k == std::vector<std::size_t>{1, 2});
  REQUIRE(report.curve.size() == 2);
  CHECK(report.curve[0].mean_accuracy == 0.75);
  CHECK(report.curve[0].std_accuracy == 0.25);
  CHECK(report.curve[1].mean_accuracy == 1.0);
  CHECK(report.curve[1].std_accuracy == 0.0);

  // k = 3 and k = 7 tie on a fold: 3 wins.
  std::vector<std::vector<std::uint64_t>> rows(8, {1, 1});
  rows[2] = {5, 5};
  rows[6] = {5, 1};
  const auto tie = select_k(matrix_from(rows, {5, 5}));
  CHECK(tie.best_k_per_fold == std::vector<std::size_t>{3, 3});
  CHECK(tie.k_star == 3);

  CHECK(select_k(matrix_from({{1, 1}, {0, 0}}, {1, 1})).k_star == 1);
  // Mean 2.5 rounds to 3; mean 2.333 rounds to 2.
  CHECK(select_k(matrix_from({{0, 0}, {1, 0}, {0, 1}}, {1, 1})).k_star == 3);
  CHECK(select_k(matrix_from({{0, 0, 0}, {1, 1, 0}, {0, 0, 1}}, {1, 1, 1})).k_star == 2);
}

TEST_CASE("accuracy curve export") {
  const auto report = select_k(matrix_from({{2, 1}, {2, 2}}, {2, 2}));
  const auto dir = std::filesystem::temp_directory_path();
  accuracy_curve_export(report, dir / "kscan_curve_a.csv");
  accuracy_curve_export(report, dir / "kscan_curve_b.csv");
  const std::string text = slurp(dir / "kscan_curve_a.csv");
  CHECK(text == "k,mean_accuracy,std_accuracy\n1,0.750000,0.250000\n2,1.000000,0.000000\n");
  CHECK(slurp(dir / "kscan_curve_b.csv") == text);
  CHECK_THROWS_AS(accuracy_curve_export(report, dir / "kscan_missing_dir" / "x" / "c.csv"), Error);
}

TEST_CASE("report JSON carries the documented fields") {
  auto report = select_k(matrix_from({{2, 1}, {2, 2}}, {2, 2}));
  report.timing.total_seconds = 0.5;
  const auto j = to_json(report);
  for (const char* key : {"best_k_per_fold", "k_star", "curve", "evaluated_k", "timing"}) CHECK(j.contains(key));
  CHECK(j["curve"][0]["mean_accuracy"] == 0.75);
  const auto back = report_from_json(j);
  CHECK(back.k_star == report.k_star);
  CHECK(back.best_k_per_fold == report.best_k_per_fold);
  CHECK(back.curve.size() == 2);
  CHECK(back.timing.total_seconds == 0.5);
  CHECK_THROWS_AS(report_from_json(nlohmann::json::object()), Error);
}
