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

#include "kscan/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "kscan/error.hpp"
#include "kscan/rng.hpp"

namespace kscan {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

[[noreturn]] void parse_fail(std::string_view source, std::size_t line, std::size_t column,
                             const std::string& what) {
  std::ostringstream msg;
  msg << source << ": line " << line << ", column " << column << ": " << what;
  throw Error(ErrorCode::kParse, msg.str());
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kDimensionMismatch, "feature buffer size does not match rows x cols");
  }
}

Dataset::Dataset(FeatureMatrix features, std::vector<ClassCode> labels,
                 std::vector<std::string> class_names)
    : features_(std::move(features)), labels_(std::move(labels)), class_names_(std::move(class_names)) {
  if (features_.rows() != labels_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature rows and label count differ");
  }
  if (labels_.size() < 2) {
    throw Error(ErrorCode::kEmptyDataset,
                "dataset needs at least 2 rows, got " + std::to_string(labels_.size()));
  }
  if (features_.cols() < 1) {
    throw Error(ErrorCode::kBadParams, "dataset needs at least one feature column");
  }
  if (class_names_.size() < 2) {
    throw Error(ErrorCode::kSingleClass, "dataset needs at least 2 classes");
  }
  std::vector<bool> seen(class_names_.size(), false);
  for (ClassCode c : labels_) {
    if (c >= class_names_.size()) {
      throw Error(ErrorCode::kBadParams, "label code " + std::to_string(c) + " out of range");
    }
    seen[c] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorCode::kBadParams, "every class code must appear at least once");
  }
  for (std::size_t i = 0; i < features_.values().size(); ++i) {
    if (!std::isfinite(features_.values()[i])) {
      throw Error(ErrorCode::kNonFiniteFeature,
                  "non-finite feature at row " + std::to_string(i / features_.cols()) +
                      ", column " + std::to_string(i % features_.cols()));
    }
  }
}

Dataset Dataset::scaled(double factor) const {
  std::vector<double> values(features_.values().begin(), features_.values().end());
  for (double& v : values) v *= factor;
  return Dataset(FeatureMatrix(features_.rows(), features_.cols(), std::move(values)), labels_,
                 class_names_);
}

std::size_t FoldAssignment::max_fold_size() const noexcept {
  return fold_sizes.empty() ? 0 : *std::max_element(fold_sizes.begin(), fold_sizes.end());
}

Dataset parse_csv(std::string_view text, const LabelColumn& label_column, std::string_view source) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& out) {
    while (pos < text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      out = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!trim(out).empty()) return true;
    }
    return false;
  };

  std::string_view line;
  if (!next_line(line)) {
    throw Error(ErrorCode::kEmptyDataset, std::string(source) + ": file is empty");
  }
  if (line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
  const auto header = split_fields(line);
  const std::size_t width = header.size();
  if (width < 2) parse_fail(source, line_no, 1, "need a label column and at least one feature");

  std::size_t label_idx = width;
  for (std::size_t c = 0; c < width; ++c) {
    if (header[c] == label_column.spec) {
      label_idx = c;
      break;
    }
  }
  if (label_idx == width && all_digits(label_column.spec)) {
    label_idx = std::stoul(label_column.spec);
  }
  if (label_idx >= width) {
    throw Error(ErrorCode::kParse,
                std::string(source) + ": label column '" + label_column.spec + "' not found in header");
  }

  std::vector<double> values;
  std::vector<ClassCode> labels;
  std::vector<std::string> names;
  std::unordered_map<std::string, ClassCode> codes;

  while (next_line(line)) {
    const auto fields = split_fields(line);
    if (fields.size() != width) {
      parse_fail(source, line_no, std::min(fields.size(), width) + 1,
                 "expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      const auto field = fields[c];
      if (c == label_idx) {
        if (field.empty()) parse_fail(source, line_no, c + 1, "empty label");
        auto [it, inserted] = codes.try_emplace(std::string(field), static_cast<ClassCode>(names.size()));
        if (inserted) names.emplace_back(field);
        labels.push_back(it->second);
        continue;
      }
      double v = 0.0;
      const char* first = field.data();
      const char* last = field.data() + field.size();
      if (first != last && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (field.empty() || ec != std::errc() || ptr != last) {
        if (ec == std::errc::result_out_of_range) {
          throw Error(ErrorCode::kNonFiniteFeature, std::string(source) + ": line " + std::to_string(line_no) +
                                                        ", column " + std::to_string(c + 1) + ": value overflows");
        }
        parse_fail(source, line_no, c + 1, "not a number: '" + std::string(field) + "'");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteFeature, std::string(source) + ": line " + std::to_string(line_no) +
                                                      ", column " + std::to_string(c + 1) + ": non-finite value '" +
                                                      std::string(field) + "'");
      }
      values.push_back(v);
    }
  }

  const std::size_t n = labels.size();
  return Dataset(FeatureMatrix(n, width - 1, std::move(values)), std::move(labels), std::move(names));
}

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), label_column, path.string());
}

FoldAssignment make_folds(std::vector<FoldIndex> fold_of, std::size_t folds) {
  if (folds < 2) throw Error(ErrorCode::kBadFoldCount, "fold count must be at least 2");
  FoldAssignment out;
  out.fold_sizes.assign(folds, 0);
  for (FoldIndex f : fold_of) {
    if (f >= folds) throw Error(ErrorCode::kInconsistentInputs, "fold index out of range");
    ++out.fold_sizes[f];
  }
  for (std::size_t size : out.fold_sizes) {
    if (size == 0) throw Error(ErrorCode::kInconsistentInputs, "every fold must be non-empty");
  }
  out.fold_of = std::move(fold_of);
  return out;
}

FoldAssignment stratified_folds(std::span<const ClassCode> labels, std::size_t num_classes,
                                std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::kBadFoldCount, "fold count must be at least 2, got " + std::to_string(folds));
  if (folds > labels.size()) {
    throw Error(ErrorCode::kTooManyFolds, "fold count " + std::to_string(folds) + " exceeds row count " +
                                              std::to_string(labels.size()));
  }
  std::vector<std::vector<std::size_t>> members(num_classes);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] >= num_classes) throw Error(ErrorCode::kInconsistentInputs, "label out of range");
    members[labels[r]].push_back(r);
  }

  SplitMix64 rng(seed);
  std::vector<FoldIndex> fold_of(labels.size());
  std::size_t cursor = 0;
  for (auto& rows : members) {
    for (std::size_t i = rows.size(); i > 1; --i) {
      std::swap(rows[i - 1], rows[rng.below(i)]);
    }
    for (std::size_t r : rows) {
      fold_of[r] = static_cast<FoldIndex>(cursor);
      cursor = (cursor + 1) % folds;
    }
  }
  return make_folds(std::move(fold_of), folds);
}

FoldAssignment stratified_folds(const Dataset& dataset, std::size_t folds, std::uint64_t seed) {
  return stratified_folds(dataset.labels(), dataset.num_classes(), folds, seed);
}

Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.classes < 2 || spec.n < spec.classes || spec.dims < 1 || !(spec.spread > 0.0) ||
      !std::isfinite(spec.spread)) {
    throw Error(ErrorCode::kBadParams, "synthetic data needs n >= s >= 2, d >= 1, spread > 0");
  }
  std::size_t base = 1;
  for (;;) {
    std::size_t capacity = 1;
    for (std::size_t i = 0; i < spec.dims && capacity < spec.classes; ++i) capacity *= base;
    if (capacity >= spec.classes) break;
    ++base;
  }

  SplitMix64 rng(seed);
  std::vector<double> values(spec.n * spec.dims);
  std::vector<ClassCode> labels(spec.n);
  for (std::size_t r = 0; r < spec.n; ++r) {
    const auto c = static_cast<ClassCode>(r % spec.classes);
    labels[r] = c;
    std::size_t digits = c;
    for (std::size_t j = 0; j < spec.dims; ++j) {
      const double centre = static_cast<double>(digits % base);
      digits /= base;
      values[r * spec.dims + j] = centre + spec.spread * rng.normal();
    }
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < spec.classes; ++c) names.push_back("c" + std::to_string(c));
  return Dataset(FeatureMatrix(spec.n, spec.dims, std::move(values)), std::move(labels), std::move(names));
}

}  // namespace kscan
