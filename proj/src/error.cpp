// Copyright 2026 The FTT Authors
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

#include "ftt/error.hpp"

namespace ftt {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kDanglingNodeReference: return "DanglingNodeReference";
    case ErrorCode::kNonPositiveCapacity: return "NonPositiveCapacity";
    case ErrorCode::kNonPositiveFreeFlowTime: return "NonPositiveFreeFlowTime";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kNegativeCost: return "NegativeCost";
    case ErrorCode::kDisconnectedOD: return "DisconnectedOD";
    case ErrorCode::kRowSumViolation: return "RowSumViolation";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNegativeDemand: return "NegativeDemand";
    case ErrorCode::kNoPathForOD: return "NoPathForOD";
    case ErrorCode::kZeroTotalCost: return "ZeroTotalCost";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kBadMode: return "BadMode";
    case ErrorCode::kBadRanks: return "BadRanks";
    case ErrorCode::kZeroNorm: return "ZeroNorm";
    case ErrorCode::kInnerSolverDiverged: return "InnerSolverDiverged";
    case ErrorCode::kNonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorCode::kInvalidLink: return "InvalidLink";
  }
  return "Unknown";
}

}  // namespace ftt
