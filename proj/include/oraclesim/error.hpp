// Copyright 2026 The OracleSim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oraclesim {

enum class ErrorCode {
  kOverflow,
  kInsufficientFunds,
  kUnknownAddress,
  kUnknownEscrow,
  kEscrowClosed,
  kInvalidArgument,
  kUnknownSla,
  kWrongStatus,
  kWindowClosed,
  kWindowOpen,
  kUnqualified,
  kDuplicate,
  kNotSelected,
  kPhaseClosed,
  kNoCommitment,
  kAlreadyFinalized,
  kNotOwner,
  kUnknownKey,
  kParseFailure,
  kPathMiss,
  kOutOfBounds,
  kBadExpression,
  kUnknownFixture,
  kFixtureDigestMismatch,
  kDecryptFailure,
  kUnknownComputation,
  kSchemaViolation,
  kAdapterFailure,
  kUnknownSubtask,
  kQuorumMet,
  kQuorumNotMet,
  kSameAnswer,
  kDeadlinePassed,
  kDeadlineNotReached,
  kConfigError,
  kMalformedLog,
  kInvariantViolation,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace oraclesim
