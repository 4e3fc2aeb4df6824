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

#include <stdexcept>
#include <string>

namespace kscan {

// Numeric values double as process exit codes for the CLI; keep them stable.
enum class ErrorCode : int {
  kUsage = 2,
  kParse = 3,
  kEmptyDataset = 4,
  kSingleClass = 5,
  kNonFiniteFeature = 6,
  kBadFoldCount = 7,
  kTooManyFolds = 8,
  kBadParams = 9,
  kMemoryBudgetExceeded = 10,
  kInconsistentInputs = 11,
  kKTooLarge = 12,
  kDimensionMismatch = 13,
  kIo = 14,
  kAgreement = 15,
  kEmptyNeighborhood = 16,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

}  // namespace kscan
