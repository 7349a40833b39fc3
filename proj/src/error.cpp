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

#include "oraclesim/error.hpp"

namespace oraclesim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOverflow: return "overflow";
    case ErrorCode::kInsufficientFunds: return "insufficient-funds";
    case ErrorCode::kUnknownAddress: return "unknown-address";
    case ErrorCode::kUnknownEscrow: return "unknown-escrow";
    case ErrorCode::kEscrowClosed: return "escrow-closed";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kUnknownSla: return "unknown-sla";
    case ErrorCode::kWrongStatus: return "wrong-status";
    case ErrorCode::kWindowClosed: return "window-closed";
    case ErrorCode::kWindowOpen: return "window-open";
    case ErrorCode::kUnqualified: return "unqualified";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kNotSelected: return "not-selected";
    case ErrorCode::kPhaseClosed: return "phase-closed";
    case ErrorCode::kNoCommitment: return "no-commitment";
    case ErrorCode::kAlreadyFinalized: return "already-finalized";
    case ErrorCode::kNotOwner: return "not-owner";
    case ErrorCode::kUnknownKey: return "unknown-key";
    case ErrorCode::kParseFailure: return "parse-failure";
    case ErrorCode::kPathMiss: return "path-miss";
    case ErrorCode::kOutOfBounds: return "out-of-bounds";
    case ErrorCode::kBadExpression: return "bad-expression";
    case ErrorCode::kUnknownFixture: return "unknown-fixture";
    case ErrorCode::kFixtureDigestMismatch: return "fixture-digest-mismatch";
    case ErrorCode::kDecryptFailure: return "decrypt-failure";
    case ErrorCode::kUnknownComputation: return "unknown-computation";
    case ErrorCode::kSchemaViolation: return "schema-violation";
    case ErrorCode::kAdapterFailure: return "adapter-failure";
    case ErrorCode::kUnknownSubtask: return "unknown-subtask";
    case ErrorCode::kQuorumMet: return "quorum-met";
    case ErrorCode::kQuorumNotMet: return "quorum-not-met";
    case ErrorCode::kSameAnswer: return "same-answer";
    case ErrorCode::kDeadlinePassed: return "deadline-passed";
    case ErrorCode::kDeadlineNotReached: return "deadline-not-reached";
    case ErrorCode::kConfigError: return "config-error";
    case ErrorCode::kMalformedLog: return "malformed-log";
    case ErrorCode::kInvariantViolation: return "invariant-violation";
  }
  return "unknown";
}

}  // namespace oraclesim
