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

#include <map>
#include <optional>
#include <set>

#include "oraclesim/aggregate.hpp"
#include "oraclesim/market.hpp"

// Commit-reveal data reporting and the aggregating contract.
//
// Phases follow the finalized SLA: commits are accepted during
// [finalized_at, commit_closes), reveals during [commit_closes,
// reveal_closes), and aggregation from reveal_closes onward.
namespace oraclesim::reporting {

using ledger::Address;
using market::SlaId;

struct Commitment {
  Digest digest{};
  Address committer;
  SlaId sla = 0;
  ledger::BlockHeight commit_height;
};

struct Reveal {
  AnswerValue value;
  Digest salt{};
};

enum class Phase { kInactive, kCommit, kReveal, kClosed };
enum class RevealOutcome { kAccepted, kDigestMismatch };

/// SHA-256("ORACLE-COMMIT-V1" || be64(sla) || oracle || canon(value) || salt)
Digest commitment_digest(SlaId sla, const Address& oracle, const AnswerValue& value, const Digest& salt);

class Reporting {
 public:
  Reporting(ledger::Ledger& ledger, market::Market& market);

  const Address& address() const { return address_; }
  Phase phase(SlaId sla) const;

  void commit(SlaId sla, const Address& oracle, const Digest& digest);
  /// A mismatching reveal is not an exception: the oracle is marked invalid
  /// for this SLA and may not reveal again.
  RevealOutcome reveal(SlaId sla, const Address& oracle, const AnswerValue& value, const Digest& salt);

  /// Runs the SLA's aggregator, stores the answer in the purchaser's
  /// callback slot and records one validity entry per selected oracle.
  const AggregationResult& finalize_aggregation(SlaId sla);

  /// Answer delivered to the purchaser, if aggregation has run.
  const AggregationResult* delivered(SlaId sla) const;
  const Commitment* commitment(SlaId sla, const Address& oracle) const;
  std::optional<AnswerValue> revealed_value(SlaId sla, const Address& oracle) const;

 private:
  struct Round {
    std::map<Address, Commitment> commitments;
    std::map<Address, AnswerValue> accepted;
    std::set<Address> mismatched;
    std::optional<AggregationResult> result;
  };

  ledger::Ledger& ledger_;
  market::Market& market_;
  Address address_;
  std::map<SlaId, Round> rounds_;
};

}  // namespace oraclesim::reporting
