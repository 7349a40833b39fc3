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

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oraclesim/aggregate.hpp"
#include "oraclesim/ledger.hpp"
#include "oraclesim/query.hpp"

// On-chain oracle market: a reputation contract tracking per-oracle
// performance counters and an order-matching contract running SLA
// proposals, penalty-backed bidding and oracle selection.
namespace oraclesim::market {

using ledger::Address;
using ledger::BlockHeight;
using ledger::EscrowId;
using ledger::TokenAmount;

using SlaId = std::uint64_t;

struct SlaProposal {
  query::QuerySpec query;
  std::uint32_t oracles_needed = 1;
  std::uint64_t bidding_window = 1;
  TokenAmount penalty{0};  // per oracle
  TokenAmount reward{0};   // total
  reporting::Aggregator aggregator;
  Address reputation_contract{};  // zero selects the market's own
  double min_reputation = 0.0;
  reporting::AnswerKind answer_kind = reporting::AnswerKind::kNumeric;
  std::uint32_t decimals = 0;  // fixed-point scale of numeric answers
  std::optional<std::uint64_t> commit_window;  // defaults to bidding_window
  std::optional<std::uint64_t> reveal_window;  // defaults to bidding_window

  std::uint64_t commit_blocks() const { return commit_window.value_or(bidding_window); }
  std::uint64_t reveal_blocks() const { return reveal_window.value_or(bidding_window); }

  void validate() const;
  nlohmann::json to_json() const;
};

enum class SlaStatus { kPending, kBidding, kActive, kAggregated, kSettled, kVoided };
std::string_view to_string(SlaStatus status);

struct OracleBid {
  Address oracle;
  EscrowId deposit = 0;
  BlockHeight bid_height;
  double score_at_bid = 0.0;
};

struct FinalizedSla {
  SlaId id = 0;
  Address purchaser;
  SlaProposal proposal;
  SlaStatus status = SlaStatus::kPending;
  BlockHeight proposed_at;
  BlockHeight finalized_at;
  EscrowId reward_escrow = 0;
  std::vector<OracleBid> bids;
  std::vector<Address> selected;
  std::map<Address, EscrowId> escrows;
  std::map<Address, bool> validity;  // one entry per recorded oracle

  BlockHeight bidding_closes() const { return proposed_at + proposal.bidding_window; }
  BlockHeight commit_closes() const { return finalized_at + proposal.commit_blocks(); }
  BlockHeight reveal_closes() const { return commit_closes() + proposal.reveal_blocks(); }
  bool is_selected(const Address& oracle) const;
};

struct ReputationRecord {
  Address oracle;
  std::uint64_t assigned = 0;
  std::uint64_t completed = 0;  // responded with a verifiable answer
  std::uint64_t valid = 0;
  std::uint64_t penalized = 0;

  /// Laplace-smoothed success rate (valid + 1) / (assigned + 2).
  double score() const;
  /// Same score in parts per million, floored.
  std::uint64_t score_ppm() const;
};

class ReputationContract {
 public:
  explicit ReputationContract(ledger::Ledger& ledger);

  const Address& address() const { return address_; }
  ReputationRecord record(const Address& oracle) const;
  double score(const Address& oracle) const { return record(oracle).score(); }

  void on_assigned(const Address& oracle);
  void on_result(const Address& oracle, bool responded, bool valid);

 private:
  Address address_;
  std::map<Address, ReputationRecord> records_;
};

class Market {
 public:
  Market(ledger::Ledger& ledger, ReputationContract& reputation);

  const Address& address() const { return address_; }

  /// Escrows the reward and opens bidding; emits `sla_proposed`.
  SlaId propose_sla(const Address& purchaser, const SlaProposal& proposal);
  /// Records the request without taking payment; `fund_sla` opens bidding.
  SlaId request_sla(const Address& purchaser, const SlaProposal& proposal);
  void fund_sla(SlaId id);
  /// Pending request that failed its payment check; emits `sla_voided`.
  void void_request(SlaId id, std::string_view reason);
  /// Manual matching: the purchaser picks the oracles up front. Bidding is
  /// skipped but every listed oracle still escrows its penalty.
  SlaId propose_manual(const Address& purchaser, const SlaProposal& proposal, const std::vector<Address>& oracles);

  void submit_bid(const Address& oracle, SlaId id);
  /// Selects oracles_needed bidders by (score at bid desc, bid height asc,
  /// address asc) and refunds the rest. With too few bids the SLA is voided,
  /// everything is refunded and the returned record has status kVoided.
  const FinalizedSla& finalize_sla(SlaId id);

  /// Valid: penalty returned and a reward share paid. Invalid or missing:
  /// penalty forfeited to the purchaser. Once every selected oracle has a
  /// record the reward remainder goes back to the purchaser (kSettled).
  void record_validity(SlaId id, const Address& oracle, bool was_valid, bool responded = true);
  void mark_aggregated(SlaId id);

  double reputation_score(const Address& oracle) const { return reputation_.score(oracle); }
  const ReputationContract& reputation() const { return reputation_; }

  const FinalizedSla& sla(SlaId id) const;
  bool contains(SlaId id) const { return id < slas_.size(); }
  std::size_t size() const { return slas_.size(); }
  bool bidding_open(SlaId id) const;

 private:
  FinalizedSla& get(SlaId id);
  void advance_status(FinalizedSla& sla, SlaStatus next);
  void settle(FinalizedSla& sla);

  ledger::Ledger& ledger_;
  ReputationContract& reputation_;
  Address address_;
  std::vector<FinalizedSla> slas_;
};

}  // namespace oraclesim::market
