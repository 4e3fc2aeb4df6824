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
#include <vector>

namespace kscan {

using ClassCode = std::uint32_t;
using FoldIndex = std::uint32_t;

/// Dense row-major matrix of feature values.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const double> row(std::size_t r) const noexcept {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Labelled numeric data. Construction validates all invariants:
/// n >= 2, d >= 1, s >= 2, every class code used, all features finite.
class Dataset {
 public:
  Dataset(FeatureMatrix features, std::vector<ClassCode> labels,
          std::vector<std::string> class_names);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dims() const noexcept { return features_.cols(); }
  std::size_t num_classes() const noexcept { return class_names_.size(); }

  const FeatureMatrix& features() const noexcept { return features_; }
  std::span<const ClassCode> labels() const noexcept { return labels_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }

  /// Same labels and class names, features multiplied by `factor`.
  Dataset scaled(double factor) const;

 private:
  FeatureMatrix features_;
  std::vector<ClassCode> labels_;
  std::vector<std::string> class_names_;
};

struct FoldAssignment {
  std::vector<FoldIndex> fold_of;
  std::vector<std::size_t> fold_sizes;

  std::size_t num_folds() const noexcept { return fold_sizes.size(); }
  std::size_t size() const noexcept { return fold_of.size(); }
  std::size_t max_fold_size() const noexcept;
};

/// Column selector: a header name, or a zero-based index when no header
/// matches and the text is all digits.
struct LabelColumn {
  std::string spec;
};

/// Reads a comma-separated file with a header row. Labels are encoded by
/// order of first appearance. Fields are not quoted.
Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column);

/// Same as load_csv but from an in-memory buffer; `source` names it in errors.
Dataset parse_csv(std::string_view text, const LabelColumn& label_column,
                  std::string_view source = "<memory>");

/// Per-class shuffle (SplitMix64, Fisher-Yates from the back) followed by a
/// round-robin deal whose cursor carries over from one class to the next.
/// Classes are visited in code order and members start in row order.
FoldAssignment stratified_folds(std::span<const ClassCode> labels, std::size_t num_classes,
                                std::size_t folds, std::uint64_t seed);
FoldAssignment stratified_folds(const Dataset& dataset, std::size_t folds, std::uint64_t seed);

/// Wraps an explicit fold vector, validating indices and computing sizes.
FoldAssignment make_folds(std::vector<FoldIndex> fold_of, std::size_t folds);

struct SyntheticSpec {
  std::size_t n = 0;
  std::size_t dims = 0;
  std::size_t classes = 0;
  double spread = 0.0;
};

/// Isotropic Gaussian mixture. Row r belongs to class r mod s; class c is
/// centred on lattice point c written in base m (m = smallest integer with
/// m^d >= s), one digit per coordinate, least significant first.
Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace kscan
