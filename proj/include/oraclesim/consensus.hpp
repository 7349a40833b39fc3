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
#include <string>
#include <vector>

#include "oraclesim/ledger.hpp"

namespace oraclesim::consensus {

using ledger::Address;
using ledger::BlockHeight;
using ledger::EscrowId;
using ledger::TokenAmount;

using InquiryId = std::uint64_t;
/// Booleans are 0/1, categories 0..k-1, numeric answers any int64.
using Answer = std::int64_t;

enum class Domain { kBoolean, kCategorical, kNumeric };

struct AnswerDomain {
  Domain kind = Domain::kBoolean;
  std::uint32_t categories = 2;  // categorical only

  static AnswerDomain boolean() { return {Domain::kBoolean, 2}; }
  static AnswerDomain categorical(std::uint32_t k) { return {Domain::kCategorical, k}; }
  static AnswerDomain numeric() { return {Domain::kNumeric, 0}; }
  bool contains(Answer a) const;
  std::string to_string() const;
};

enum class InquiryStatus { kOpen, kResolved, kChallenged, kFinal };
std::string_view to_string(InquiryStatus s);

enum class Side { kSupportOriginal, kSupportChallenge };

struct Report {
  Address reporter;
  Answer answer = 0;
  std::uint64_t weight = 0;  // stake at report time, or 1 in head-count mode
  TokenAmount deposit;
  EscrowId escrow = 0;
};

struct Stake {
  Address staker;
  TokenAmount amount;
  EscrowId escrow = 0;
};

struct Challenge {
  Address challenger;
  Answer claimed = 0;
  std::vector<Stake> support;  // keeps the resolved answer
  std::vector<Stake> dispute;  // backs the claimed answer; the challenge deposit is first
  BlockHeight deadline;

  TokenAmount support_pool() const;
  TokenAmount dispute_pool() const;
};

struct InquiryRound {
  InquiryId id = 0;
  std::string question;  // opaque; never interpreted
  AnswerDomain domain;
  std::uint32_t quorum = 1;
  TokenAmount deposit_required;
  std::vector<Report> reports;  // submission order
  InquiryStatus status = InquiryStatus::kOpen;
  std::optional<Answer> resolved;  // consensus answer
  std::optional<Answer> final_answer;
  BlockHeight resolved_at;
  std::optional<Challenge> challenge;
  bool flipped = false;

  const Report* report_of(const Address& reporter) const;
};

struct ConsensusOptions {
  bool head_count = false;  // one identity, one vote; Sybil-able on purpose
  TokenAmount challenge_deposit{100};
  std::uint64_t challenge_window = 20;
};

/// Stake-weighted mode (ties to the smallest answer) for boolean and
/// categorical domains, lower weighted median for numeric ones.
Answer resolve_weighted(const AnswerDomain& domain, const std::vector<std::pair<Answer, std::uint64_t>>& votes);

class Consensus {
 public:
  explicit Consensus(ledger::Ledger& ledger, ConsensusOptions options = {});

  const Address& address() const { return address_; }
  const Address& sink() const { return sink_; }
  const ConsensusOptions& options() const { return options_; }

  InquiryId open_inquiry(std::string question, AnswerDomain domain, std::uint32_t quorum, TokenAmount deposit_required);
  /// Escrows the deposit; the report that meets quorum resolves the round.
  void submit_report(InquiryId id, const Address& reporter, Answer answer);
  /// Matching reporters get their deposit back plus a weight-pro-rata share
  /// of the forfeited ones; the rounding remainder goes to the sink.
  Answer resolve_consensus(InquiryId id);

  void open_challenge(InquiryId id, const Address& challenger, Answer claimed);
  void stake_side(InquiryId id, const Address& staker, Side side, TokenAmount amount);
  /// Larger pool wins and takes the losing pool pro-rata; a tie keeps the
  /// original answer and refunds everyone.
  Answer resolve_challenge(InquiryId id);
  /// Closes an unchallenged round once the challenge window has passed.
  Answer finalize(InquiryId id);

  const InquiryRound& inquiry(InquiryId id) const;
  std::size_t size() const { return rounds_.size(); }

 private:
  InquiryRound& get(InquiryId id);
  /// Refunds `winners`, splits `losers` pro-rata by `weights` and sends the
  /// remainder to the sink. Returns the remainder.
  TokenAmount redistribute(const std::vector<std::pair<EscrowId, Address>>& winners,
                           const std::vector<std::uint64_t>& weights, const std::vector<EscrowId>& losers);

  ledger::Ledger& ledger_;
  ConsensusOptions options_;
  Address address_;
  Address sink_;
  std::vector<InquiryRound> rounds_;
};

}  // namespace oraclesim::consensus
