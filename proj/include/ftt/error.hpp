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

#ifndef FTT_ERROR_HPP_
#define FTT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ftt {

// Values are mirrored one-to-one by ftt_status in ftt/ftt.h.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kIo = 2,
  kParse = 3,
  kMissingColumn = 4,
  kDanglingNodeReference = 5,
  kNonPositiveCapacity = 6,
  kNonPositiveFreeFlowTime = 7,
  kDuplicateId = 8,
  kNegativeCost = 9,
  kDisconnectedOD = 10,
  kRowSumViolation = 11,
  kDimensionMismatch = 12,
  kNegativeDemand = 13,
  kNoPathForOD = 14,
  kZeroTotalCost = 15,
  kOutOfRange = 16,
  kBadMode = 17,
  kBadRanks = 18,
  kZeroNorm = 19,
  kInnerSolverDiverged = 20,
  kNonFiniteEvaluation = 21,
  kInvalidLink = 22,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) Fail(code, message);
}

}  // namespace ftt

#endif  // FTT_ERROR_HPP_
