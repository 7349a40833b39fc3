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

#include "oraclesim/consensus.hpp"

#include <algorithm>

#include <json.hpp>

#include "oraclesim/error.hpp"

namespace oraclesim::consensus {

using nlohmann::json;

bool AnswerDomain::contains(Answer a) const {
  switch (kind) {
    case Domain::kBoolean: return a == 0 || a == 1;
    case Domain::kCategorical: return a >= 0 && a < static_cast<Answer>(categories);
    case Domain::kNumeric: return true;
  }
  return false;
}

std::string AnswerDomain::to_string() const {
  switch (kind) {
    case Domain::kBoolean: return "boolean";
    case Domain::kCategorical: return "categorical(" + std::to_string(categories) + ")";
    case Domain::kNumeric: return "numeric";
  }
  return "unknown";
}

std::string_view to_string(InquiryStatus s) {
  switch (s) {
    case InquiryStatus::kOpen: return "open";
    case InquiryStatus::kResolved: return "resolved";
    case InquiryStatus::kChallenged: return "challenged";
    case InquiryStatus::kFinal: return "final";
  }
  return "unknown";
}

namespace {

TokenAmount pool_sum(const std::vector<Stake>& pool) {
  TokenAmount sum{0};
  for (const auto& s : pool) sum += s.amount;
  return sum;
}

}  // namespace

TokenAmount Challenge::support_pool() const { return pool_sum(support); }
TokenAmount Challenge::dispute_pool() const { return pool_sum(dispute); }

const Report* InquiryRound::report_of(const Address& reporter) const {
  for (const auto& r : reports) {
    if (r.reporter == reporter) return &r;
  }
  return nullptr;
}

Answer resolve_weighted(const AnswerDomain& domain, const std::vector<std::pair<Answer, std::uint64_t>>& votes) {
  if (votes.empty()) throw Error(ErrorCode::kQuorumNotMet, "no reports");
  std::map<Answer, unsigned __int128> totals;
  unsigned __int128 all = 0;
  for (const auto& [answer, weight] : votes) {
    totals[answer] += weight;
    all += weight;
  }
  if (domain.kind == Domain::kNumeric) {
    unsigned __int128 running = 0;
    for (const auto& [answer, w] : totals) {
      running += w;
      if (running * 2 >= all) return answer;
    }
    return totals.rbegin()->first;
  }
  Answer best = totals.begin()->first;
  unsigned __int128 best_weight = totals.begin()->second;
  for (const auto& [answer, w] : totals) {
    if (w > best_weight) {
      best = answer;
      best_weight = w;
    }
  }
  return best;
}

Consensus::Consensus(ledger::Ledger& ledger, ConsensusOptions options)
    : ledger_(ledger),
      options_(options),
      address_(ledger.register_contract("consensus")),
      sink_(ledger.register_contract("consensus-sink")) {
  if (options_.challenge_window == 0) throw Error(ErrorCode::kInvalidArgument, "challenge window must be positive");
}

InquiryRound& Consensus::get(InquiryId id) {
  if (id >= rounds_.size()) throw Error(ErrorCode::kUnknownKey, "inquiry " + std::to_string(id));
  return rounds_[id];
}

const InquiryRound& Consensus::inquiry(InquiryId id) const {
  if (id >= rounds_.size()) throw Error(ErrorCode::kUnknownKey, "inquiry " + std::to_string(id));
  return rounds_[id];
}

InquiryId Consensus::open_inquiry(std::string question, AnswerDomain domain, std::uint32_t quorum,
                                  TokenAmount deposit_required) {
  if (quorum == 0) throw Error(ErrorCode::kInvalidArgument, "quorum must be at least 1");
  if (domain.kind == Domain::kCategorical && domain.categories < 2) {
    throw Error(ErrorCode::kInvalidArgument, "categorical domain needs at least 2 categories");
  }
  InquiryRound round;
  round.id = rounds_.size();
  round.question = std::move(question);
  round.domain = domain;
  round.quorum = quorum;
  round.deposit_required = deposit_required;
  rounds_.push_back(std::move(round));
  const auto& r = rounds_.back();
  ledger_.emit(address_, "inquiry_opened",
               json{{"inquiry", r.id}, {"domain", domain.to_string()}, {"quorum", quorum},
                    {"deposit", deposit_required.units()}, {"question", r.question}}
                   .dump());
  return r.id;
}

void Consensus::submit_report(InquiryId id, const Address& reporter, Answer answer) {
  InquiryRound& round = get(id);
  if (round.status != InquiryStatus::kOpen || round.reports.size() >= round.quorum) {
    throw Error(ErrorCode::kQuorumMet, "inquiry " + std::to_string(id) + " no longer takes reports");
  }
  if (round.report_of(reporter)) throw Error(ErrorCode::kDuplicate, "reporter already reported");
  if (!round.domain.contains(answer)) {
    throw Error(ErrorCode::kInvalidArgument, std::to_string(answer) + " is outside " + round.domain.to_string());
  }
  const TokenAmount stake = ledger_.balance(reporter);
  if (stake < round.deposit_required || stake.units() == 0) {
    throw Error(ErrorCode::kInsufficientFunds, "stake below the required deposit");
  }
  Report report{reporter, answer, options_.head_count ? 1 : stake.units(), round.deposit_required, 0};
  report.escrow = ledger_.escrow(reporter, address_, round.deposit_required);
  round.reports.push_back(report);
  ledger_.emit(address_, "report_submitted",
               json{{"inquiry", id}, {"reporter", reporter.hex()}, {"answer", answer}, {"weight", report.weight}}.dump());
  if (round.reports.size() == round.quorum) resolve_consensus(id);
}

TokenAmount Consensus::redistribute(const std::vector<std::pair<EscrowId, Address>>& winners,
                                    const std::vector<std::uint64_t>& weights, const std::vector<EscrowId>& losers) {
  TokenAmount forfeited{0};
  for (EscrowId e : losers) {
    forfeited += ledger_.escrow_info(e).amount;
    ledger_.release(e, address_);
  }
  unsigned __int128 total_weight = 0;
  for (auto w : weights) total_weight += w;
  TokenAmount paid{0};
  for (std::size_t i = 0; i < winners.size(); ++i) {
    ledger_.release(winners[i].first, winners[i].second);
    if (total_weight == 0) continue;
    auto share = static_cast<std::uint64_t>(static_cast<unsigned __int128>(forfeited.units()) * weights[i] / total_weight);
    if (share > 0) ledger_.transfer(address_, winners[i].second, TokenAmount{share});
    paid += TokenAmount{share};
  }
  TokenAmount remainder = forfeited - paid;
  if (remainder.units() > 0) ledger_.transfer(address_, sink_, remainder);
  return remainder;
}

Answer Consensus::resolve_consensus(InquiryId id) {
  InquiryRound& round = get(id);
  if (round.status != InquiryStatus::kOpen) {
    if (round.resolved) return *round.resolved;
    throw Error(ErrorCode::kWrongStatus, "inquiry " + std::to_string(id));
  }
  if (round.reports.size() < round.quorum) {
    throw Error(ErrorCode::kQuorumNotMet, std::to_string(round.reports.size()) + " of " +
                                              std::to_string(round.quorum) + " reports");
  }
  std::vector<std::pair<Answer, std::uint64_t>> votes;
  for (const auto& r : round.reports) votes.emplace_back(r.answer, r.weight);
  const Answer answer = resolve_weighted(round.domain, votes);

  std::vector<std::pair<EscrowId, Address>> winners;
  std::vector<std::uint64_t> weights;
  std::vector<EscrowId> losers;
  std::uint64_t matching = 0;
  for (const auto& r : round.reports) {
    if (r.answer == answer) {
      winners.emplace_back(r.escrow, r.reporter);
      weights.push_back(r.weight);
      ++matching;
    } else {
      losers.push_back(r.escrow);
    }
  }
  const TokenAmount burned = redistribute(winners, weights, losers);
  round.resolved = answer;
  round.final_answer = answer;
  round.resolved_at = ledger_.height();
  round.status = InquiryStatus::kResolved;
  ledger_.emit(address_, "inquiry_resolved",
               json{{"inquiry", id}, {"answer", answer}, {"matching", matching},
                    {"forfeited_reports", losers.size()}, {"sink", burned.units()}}
                   .dump());
  return answer;
}

void Consensus::open_challenge(InquiryId id, const Address& challenger, Answer claimed) {
  InquiryRound& round = get(id);
  if (round.status == InquiryStatus::kFinal) throw Error(ErrorCode::kAlreadyFinalized, "inquiry is final");
  if (round.status == InquiryStatus::kChallenged) throw Error(ErrorCode::kDuplicate, "inquiry already challenged");
  if (round.status != InquiryStatus::kResolved) throw Error(ErrorCode::kWrongStatus, "inquiry is not resolved");
  if (ledger_.height() >= round.resolved_at + options_.challenge_window) {
    throw Error(ErrorCode::kDeadlinePassed, "challenge window closed");
  }
  if (claimed == *round.resolved) throw Error(ErrorCode::kSameAnswer, "challenge must claim a different answer");
  if (!round.domain.contains(claimed)) throw Error(ErrorCode::kInvalidArgument, "claimed answer outside domain");
  if (ledger_.balance(challenger) < options_.challenge_deposit) {
    throw Error(ErrorCode::kInsufficientFunds, "challenge needs " + std::to_string(options_.challenge_deposit.units()));
  }
  Challenge c;
  c.challenger = challenger;
  c.claimed = claimed;
  c.deadline = ledger_.height() + options_.challenge_window;
  c.dispute.push_back({challenger, options_.challenge_deposit,
                       ledger_.escrow(challenger, address_, options_.challenge_deposit)});
  round.challenge = std::move(c);
  round.status = InquiryStatus::kChallenged;
  ledger_.emit(address_, "challenge_opened",
               json{{"inquiry", id}, {"challenger", challenger.hex()}, {"claimed", claimed},
                    {"deposit", options_.challenge_deposit.units()}, {"deadline", round.challenge->deadline.value}}
                   .dump());
}

void Consensus::stake_side(InquiryId id, const Address& staker, Side side, TokenAmount amount) {
  InquiryRound& round = get(id);
  if (round.status != InquiryStatus::kChallenged) throw Error(ErrorCode::kWrongStatus, "no open challenge");
  if (ledger_.height() >= round.challenge->deadline) throw Error(ErrorCode::kDeadlinePassed, "challenge deadline");
  if (amount.units() == 0) throw Error(ErrorCode::kInvalidArgument, "stake must be positive");
  Stake s{staker, amount, ledger_.escrow(staker, address_, amount)};
  auto& pool = side == Side::kSupportOriginal ? round.challenge->support : round.challenge->dispute;
  pool.push_back(s);
  ledger_.emit(address_, "challenge_staked",
               json{{"inquiry", id}, {"staker", staker.hex()},
                    {"side", side == Side::kSupportOriginal ? "support" : "dispute"}, {"amount", amount.units()}}
                   .dump());
}

Answer Consensus::resolve_challenge(InquiryId id) {
  InquiryRound& round = get(id);
  if (round.status == InquiryStatus::kFinal) throw Error(ErrorCode::kAlreadyFinalized, "challenge already resolved");
  if (round.status != InquiryStatus::kChallenged) throw Error(ErrorCode::kWrongStatus, "no open challenge");
  Challenge& c = *round.challenge;
  if (ledger_.height() < c.deadline) throw Error(ErrorCode::kDeadlineNotReached, "challenge still open");

  const TokenAmount support = c.support_pool();
  const TokenAmount dispute = c.dispute_pool();
  TokenAmount burned{0};
  if (support == dispute) {
    for (const auto& s : c.support) ledger_.release(s.escrow, s.staker);
    for (const auto& s : c.dispute) ledger_.release(s.escrow, s.staker);
  } else {
    const bool flip = dispute > support;
    const auto& win = flip ? c.dispute : c.support;
    const auto& lose = flip ? c.support : c.dispute;
    std::vector<std::pair<EscrowId, Address>> winners;
    std::vector<std::uint64_t> weights;
    std::vector<EscrowId> losers;
    for (const auto& s : win) {
      winners.emplace_back(s.escrow, s.staker);
      weights.push_back(s.amount.units());
    }
    for (const auto& s : lose) losers.push_back(s.escrow);
    burned = redistribute(winners, weights, losers);
    round.flipped = flip;
  }
  round.final_answer = round.flipped ? c.claimed : *round.resolved;
  round.status = InquiryStatus::kFinal;
  ledger_.emit(address_, "challenge_resolved",
               json{{"inquiry", id}, {"answer", *round.final_answer}, {"flipped", round.flipped},
                    {"support", support.units()}, {"dispute", dispute.units()}, {"sink", burned.units()}}
                   .dump());
  return *round.final_answer;
}

Answer Consensus::finalize(InquiryId id) {
  InquiryRound& round = get(id);
  if (round.status == InquiryStatus::kFinal) throw Error(ErrorCode::kAlreadyFinalized, "inquiry is final");
  if (round.status == InquiryStatus::kChallenged) return resolve_challenge(id);
  if (round.status != InquiryStatus::kResolved) throw Error(ErrorCode::kWrongStatus, "inquiry is not resolved");
  if (ledger_.height() < round.resolved_at + options_.challenge_window) {
    throw Error(ErrorCode::kDeadlineNotReached, "challenge window still open");
  }
  round.status = InquiryStatus::kFinal;
  ledger_.emit(address_, "inquiry_final", json{{"inquiry", id}, {"answer", *round.final_answer}}.dump());
  return *round.final_answer;
}

}  // namespace oraclesim::consensus
