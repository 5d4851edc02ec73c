// Copyright 2026 The SPA Authors
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

#include "spa/error.hpp"

namespace spa {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUndefinedAgreement: return "undefined_agreement";
    case ErrorCode::kFullAnnotationViolation: return "full_annotation_violation";
    case ErrorCode::kEmptyTable: return "empty_table";
    case ErrorCode::kNoComputableItems: return "no_computable_items";
    case ErrorCode::kZeroChanceDenominator: return "zero_chance_denominator";
    case ErrorCode::kInvalidClassCount: return "invalid_class_count";
    case ErrorCode::kInvalidDistribution: return "invalid_distribution";
    case ErrorCode::kInvalidWeights: return "invalid_weights";
    case ErrorCode::kEnumerationTooLarge: return "enumeration_too_large";
    case ErrorCode::kDegenerateCurve: return "degenerate_curve";
    case ErrorCode::kNothingToRemove: return "nothing_to_remove";
    case ErrorCode::kEmptyResult: return "empty_result";
    case ErrorCode::kDegenerateExperiment: return "degenerate_experiment";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kUsage: return "usage";
  }
  return "unknown";
}

}  // namespace spa
