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

#include "kscan/error.hpp"

namespace kscan {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "Usage";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kNonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::kBadFoldCount: return "BadFoldCount";
    case ErrorCode::kTooManyFolds: return "TooManyFolds";
    case ErrorCode::kBadParams: return "BadParams";
    case ErrorCode::kMemoryBudgetExceeded: return "MemoryBudgetExceeded";
    case ErrorCode::kInconsistentInputs: return "InconsistentInputs";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kAgreement: return "AgreementFailure";
    case ErrorCode::kEmptyNeighborhood: return "EmptyNeighborhood";
  }
  return "Unknown";
}

}  // namespace kscan
