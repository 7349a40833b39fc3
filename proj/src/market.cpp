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

#include "oraclesim/market.hpp"

#include <algorithm>
#include <set>

#include "oraclesim/error.hpp"

namespace oraclesim::market {

using nlohmann::json;

namespace {

constexpr std::uint64_t kPriorWeight = 2;

json address_list(const std::vector<Address>& addresses) {
  json out = json::array();
  for (const auto& a : addresses) out.push_back(a.hex());
  return out;
}

}  // namespace

void SlaProposal::validate() const {
  if (oracles_needed == 0) throw Error(ErrorCode::kInvalidArgument, "oracles_needed must be at least 1");
  if (bidding_window == 0) throw Error(ErrorCode::kInvalidArgument, "bidding_window must be at least 1");
  if (commit_blocks() == 0 || reveal_blocks() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "commit and reveal windows must be at least 1 block");
  }
  if (!(min_reputation >= 0.0 && min_reputation <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "min_reputation must lie in [0, 1]");
  }
  if (aggregator.is_boolean() != (answer_kind == reporting::AnswerKind::kBoolean)) {
    throw Error(ErrorCode::kInvalidArgument, "aggregator " + aggregator.to_string() + " does not match answer kind");
  }
  if (answer_kind == reporting::AnswerKind::kBytes) {
    throw Error(ErrorCode::kInvalidArgument, "no aggregator accepts byte-string answers");
  }
  if (aggregator.is_boolean() && aggregator.threshold > oracles_needed) {
    throw Error(ErrorCode::kInvalidArgument, "threshold exceeds oracles_needed");
  }
  query.validate();
}

json SlaProposal::to_json() const {
  json j{{"query", query.to_json()},
         {"oracles_needed", oracles_needed},
         {"bidding_window", bidding_window},
         {"penalty", penalty.units()},
         {"reward", reward.units()},
         {"aggregator", aggregator.to_string()},
         {"reputation_contract", reputation_contract.hex()},
         {"min_reputation", min_reputation},
         {"answer_kind", std::string(reporting::to_string(answer_kind))},
         {"decimals", decimals},
         {"commit_window", commit_blocks()},
         {"reveal_window", reveal_blocks()}};
  return j;
}

std::string_view to_string(SlaStatus status) {
  switch (status) {
    case SlaStatus::kPending: return "pending";
    case SlaStatus::kBidding: return "bidding";
    case SlaStatus::kActive: return "active";
    case SlaStatus::kAggregated: return "aggregated";
    case SlaStatus::kSettled: return "settled";
    case SlaStatus::kVoided: return "voided";
  }
  return "unknown";
}

bool FinalizedSla::is_selected(const Address& oracle) const {
  return std::find(selected.begin(), selected.end(), oracle) != selected.end();
}

double ReputationRecord::score() const {
  return (static_cast<double>(valid) + kPriorWeight * 0.5) / static_cast<double>(assigned + kPriorWeight);
}

std::uint64_t ReputationRecord::score_ppm() const {
  return (valid + kPriorWeight / 2) * 1'000'000 / (assigned + kPriorWeight);
}

ReputationContract::ReputationContract(ledger::Ledger& ledger) : address_(ledger.register_contract("reputation")) {}

ReputationRecord ReputationContract::record(const Address& oracle) const {
  if (auto it = records_.find(oracle); it != records_.end()) return it->second;
  return ReputationRecord{oracle};
}

void ReputationContract::on_assigned(const Address& oracle) {
  auto& r = records_.try_emplace(oracle, ReputationRecord{oracle}).first->second;
  ++r.assigned;
}

void ReputationContract::on_result(const Address& oracle, bool responded, bool valid) {
  auto& r = records_.try_emplace(oracle, ReputationRecord{oracle}).first->second;
  if (responded) ++r.completed;
  if (valid) {
    ++r.valid;
  } else {
    ++r.penalized;
  }
}

Market::Market(ledger::Ledger& ledger, ReputationContract& reputation)
    : ledger_(ledger), reputation_(reputation), address_(ledger.register_contract("order-matching")) {}

FinalizedSla& Market::get(SlaId id) {
  if (id >= slas_.size()) throw Error(ErrorCode::kUnknownSla, std::to_string(id));
  return slas_[id];
}

const FinalizedSla& Market::sla(SlaId id) const {
  if (id >= slas_.size()) throw Error(ErrorCode::kUnknownSla, std::to_string(id));
  return slas_[id];
}

void Market::advance_status(FinalizedSla& sla, SlaStatus next) {
  bool allowed = next == SlaStatus::kVoided
                     ? (sla.status == SlaStatus::kPending || sla.status == SlaStatus::kBidding)
                     : static_cast<int>(next) == static_cast<int>(sla.status) + 1;
  if (!allowed) {
    throw Error(ErrorCode::kWrongStatus, "SLA " + std::to_string(sla.id) + ": " + std::string(to_string(sla.status)) +
                                             " -> " + std::string(to_string(next)));
  }
  sla.status = next;
}

SlaId Market::request_sla(const Address& purchaser, const SlaProposal& proposal) {
  proposal.validate();
  if (!ledger_.exists(purchaser)) throw Error(ErrorCode::kUnknownAddress, purchaser.hex());
  if (proposal.reputation_contract != Address{} && proposal.reputation_contract != reputation_.address()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown reputation contract " + proposal.reputation_contract.hex());
  }
  FinalizedSla sla;
  sla.id = slas_.size();
  sla.purchaser = purchaser;
  sla.proposal = proposal;
  sla.proposal.reputation_contract = reputation_.address();
  sla.proposed_at = ledger_.height();
  slas_.push_back(std::move(sla));
  return slas_.back().id;
}

void Market::fund_sla(SlaId id) {
  FinalizedSla& sla = get(id);
  if (sla.status != SlaStatus::kPending) throw Error(ErrorCode::kWrongStatus, "SLA " + std::to_string(id) + " already funded");
  sla.reward_escrow = ledger_.escrow(sla.purchaser, address_, sla.proposal.reward);
  sla.proposed_at = ledger_.height();
  advance_status(sla, SlaStatus::kBidding);
  ledger_.emit(address_, "sla_proposed",
               json{{"sla", id},
                    {"purchaser", sla.purchaser.hex()},
                    {"proposal", sla.proposal.to_json()},
                    {"bidding_closes", sla.bidding_closes().value}}
                   .dump());
}

void Market::void_request(SlaId id, std::string_view reason) {
  FinalizedSla& sla = get(id);
  if (sla.status != SlaStatus::kPending) throw Error(ErrorCode::kWrongStatus, "only pending requests can be voided");
  advance_status(sla, SlaStatus::kVoided);
  ledger_.emit(address_, "sla_voided", json{{"sla", id}, {"reason", reason}}.dump());
}

SlaId Market::propose_sla(const Address& purchaser, const SlaProposal& proposal) {
  if (ledger_.exists(purchaser) && ledger_.balance(purchaser) < proposal.reward + ledger_.flat_fee()) {
    throw Error(ErrorCode::kInsufficientFunds, "purchaser cannot escrow the reward");
  }
  SlaId id = request_sla(purchaser, proposal);
  fund_sla(id);
  return id;
}

SlaId Market::propose_manual(const Address& purchaser, const SlaProposal& proposal,
                             const std::vector<Address>& oracles) {
  if (oracles.size() != proposal.oracles_needed) {
    throw Error(ErrorCode::kInvalidArgument, "manual selection must list exactly oracles_needed oracles");
  }
  if (std::set<Address>(oracles.begin(), oracles.end()).size() != oracles.size()) {
    throw Error(ErrorCode::kDuplicate, "oracle listed twice");
  }
  for (const auto& o : oracles) {
    if (ledger_.balance(o) < proposal.penalty + ledger_.flat_fee()) {
      throw Error(ErrorCode::kInsufficientFunds, "oracle " + o.hex() + " cannot escrow the penalty");
    }
  }
  SlaId id = propose_sla(purchaser, proposal);
  FinalizedSla& sla = get(id);
  for (const auto& o : oracles) {
    EscrowId deposit = ledger_.escrow(o, address_, sla.proposal.penalty);
    sla.bids.push_back(OracleBid{o, deposit, ledger_.height(), reputation_.score(o)});
    sla.selected.push_back(o);
    sla.escrows[o] = deposit;
    reputation_.on_assigned(o);
  }
  sla.finalized_at = ledger_.height();
  advance_status(sla, SlaStatus::kActive);
  ledger_.emit(address_, "sla_finalized",
               json{{"sla", id},
                    {"selected", address_list(sla.selected)},
                    {"refunded", json::array()},
                    {"manual", true},
                    {"commit_closes", sla.commit_closes().value},
                    {"reveal_closes", sla.reveal_closes().value}}
                   .dump());
  return id;
}

bool Market::bidding_open(SlaId id) const {
  const FinalizedSla& s = sla(id);
  return s.status == SlaStatus::kBidding && ledger_.height() < s.bidding_closes();
}

void Market::submit_bid(const Address& oracle, SlaId id) {
  FinalizedSla& sla = get(id);
  if (sla.status != SlaStatus::kBidding || ledger_.height() >= sla.bidding_closes()) {
    throw Error(ErrorCode::kWindowClosed, "bidding closed for SLA " + std::to_string(id));
  }
  for (const auto& bid : sla.bids) {
    if (bid.oracle == oracle) throw Error(ErrorCode::kDuplicate, "oracle already bid on SLA " + std::to_string(id));
  }
  double score = reputation_.score(oracle);
  if (score < sla.proposal.min_reputation) {
    throw Error(ErrorCode::kUnqualified, "score " + std::to_string(score) + " below " +
                                             std::to_string(sla.proposal.min_reputation));
  }
  if (!ledger_.exists(oracle)) throw Error(ErrorCode::kUnknownAddress, oracle.hex());
  if (ledger_.balance(oracle) < sla.proposal.penalty + ledger_.flat_fee()) {
    throw Error(ErrorCode::kInsufficientFunds, "oracle cannot escrow the penalty");
  }
  EscrowId deposit = ledger_.escrow(oracle, address_, sla.proposal.penalty);
  sla.bids.push_back(OracleBid{oracle, deposit, ledger_.height(), score});
  ledger_.emit(address_, "bid_submitted", json{{"sla", id}, {"oracle", oracle.hex()}, {"escrow", deposit}}.dump());
}

const FinalizedSla& Market::finalize_sla(SlaId id) {
  FinalizedSla& sla = get(id);
  if (sla.status != SlaStatus::kBidding) {
    throw Error(ErrorCode::kWrongStatus, "SLA " + std::to_string(id) + " is " + std::string(to_string(sla.status)));
  }
  if (ledger_.height() < sla.bidding_closes()) {
    throw Error(ErrorCode::kWindowOpen, "bidding for SLA " + std::to_string(id) + " closes at " +
                                            std::to_string(sla.bidding_closes().value));
  }
  if (sla.bids.size() < sla.proposal.oracles_needed) {
    for (const auto& bid : sla.bids) ledger_.release(bid.deposit, bid.oracle);
    ledger_.release(sla.reward_escrow, sla.purchaser);
    advance_status(sla, SlaStatus::kVoided);
    ledger_.emit(address_, "sla_voided",
                 json{{"sla", id}, {"reason", "insufficient bids"}, {"bids", sla.bids.size()}}.dump());
    return sla;
  }

  std::vector<const OracleBid*> ranked;
  for (const auto& bid : sla.bids) ranked.push_back(&bid);
  std::sort(ranked.begin(), ranked.end(), [](const OracleBid* a, const OracleBid* b) {
    if (a->score_at_bid != b->score_at_bid) return a->score_at_bid > b->score_at_bid;
    if (a->bid_height != b->bid_height) return a->bid_height < b->bid_height;
    return a->oracle < b->oracle;
  });

  std::vector<Address> refunded;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const OracleBid& bid = *ranked[i];
    if (i < sla.proposal.oracles_needed) {
      sla.selected.push_back(bid.oracle);
      sla.escrows[bid.oracle] = bid.deposit;
      reputation_.on_assigned(bid.oracle);
    } else {
      ledger_.release(bid.deposit, bid.oracle);
      refunded.push_back(bid.oracle);
    }
  }
  sla.finalized_at = ledger_.height();
  advance_status(sla, SlaStatus::kActive);
  ledger_.emit(address_, "sla_finalized",
               json{{"sla", id},
                    {"selected", address_list(sla.selected)},
                    {"refunded", address_list(refunded)},
                    {"manual", false},
                    {"commit_closes", sla.commit_closes().value},
                    {"reveal_closes", sla.reveal_closes().value}}
                   .dump());
  return sla;
}

void Market::mark_aggregated(SlaId id) {
  FinalizedSla& sla = get(id);
  if (sla.status != SlaStatus::kActive) throw Error(ErrorCode::kAlreadyFinalized, "SLA " + std::to_string(id));
  advance_status(sla, SlaStatus::kAggregated);
}

void Market::record_validity(SlaId id, const Address& oracle, bool was_valid, bool responded) {
  FinalizedSla& sla = get(id);
  if (sla.status != SlaStatus::kAggregated) {
    throw Error(ErrorCode::kWrongStatus, "SLA " + std::to_string(id) + " is not aggregated");
  }
  if (!sla.is_selected(oracle)) throw Error(ErrorCode::kNotSelected, oracle.hex());
  if (sla.validity.contains(oracle)) throw Error(ErrorCode::kDuplicate, "validity already recorded for " + oracle.hex());

  sla.validity[oracle] = was_valid;
  reputation_.on_result(oracle, responded, was_valid);
  ledger_.release(sla.escrows.at(oracle), was_valid ? oracle : sla.purchaser);
  ReputationRecord record = reputation_.record(oracle);
  ledger_.emit(reputation_.address(), "validity_recorded",
               json{{"sla", id},
                    {"oracle", oracle.hex()},
                    {"valid", was_valid},
                    {"responded", responded},
                    {"assigned", record.assigned},
                    {"valid_count", record.valid}}
                   .dump());
  if (sla.validity.size() == sla.selected.size()) settle(sla);
}

void Market::settle(FinalizedSla& sla) {
  ledger_.release(sla.reward_escrow, address_);
  TokenAmount share{sla.proposal.reward.units() / sla.selected.size()};
  TokenAmount paid{0};
  json payees = json::array();
  for (const auto& oracle : sla.selected) {
    if (!sla.validity.at(oracle) || share.units() == 0) continue;
    ledger_.transfer(address_, oracle, share);
    paid += share;
    payees.push_back(oracle.hex());
  }
  TokenAmount refund = sla.proposal.reward - paid;
  ledger_.transfer(address_, sla.purchaser, refund);
  advance_status(sla, SlaStatus::kSettled);
  ledger_.emit(address_, "sla_settled",
               json{{"sla", sla.id}, {"share", share.units()}, {"paid", payees}, {"refund", refund.units()}}.dump());
}

}  // namespace oraclesim::market
