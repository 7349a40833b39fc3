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

#include <gtest/gtest.h>

#include "oraclesim/error.hpp"
#include "support/world.hpp"

namespace oraclesim::market {
namespace {

using ledger::TokenAmount;
using oraclesim::testing::numeric_proposal;
using oraclesim::testing::World;

TEST(Proposal, Validation) {
  auto p = numeric_proposal(3);
  EXPECT_NO_THROW(p.validate());
  auto bad = p;
  bad.oracles_needed = 0;
  EXPECT_ERROR_CODE(bad.validate(), ErrorCode::kInvalidArgument);
  bad = p;
  bad.bidding_window = 0;
  EXPECT_ERROR_CODE(bad.validate(), ErrorCode::kInvalidArgument);
  bad = p;
  bad.min_reputation = 1.5;
  EXPECT_ERROR_CODE(bad.validate(), ErrorCode::kInvalidArgument);
  bad = p;
  bad.aggregator = reporting::Aggregator::boolean(2);
  EXPECT_ERROR_CODE(bad.validate(), ErrorCode::kInvalidArgument);
  bad = oraclesim::testing::boolean_proposal(4, 3);
  EXPECT_ERROR_CODE(bad.validate(), ErrorCode::kInvalidArgument);
  bad = p;
  bad.query.params.clear();
  EXPECT_ERROR_CODE(bad.validate(), ErrorCode::kInvalidArgument);
  bad = p;
  bad.commit_window = 0;
  EXPECT_ERROR_CODE(bad.validate(), ErrorCode::kInvalidArgument);
}

TEST(Reputation, LaplaceScore) {
  ReputationRecord r;
  EXPECT_DOUBLE_EQ(r.score(), 0.5);
  EXPECT_EQ(r.score_ppm(), 500'000u);
  r.assigned = 3;
  r.valid = 1;
  EXPECT_DOUBLE_EQ(r.score(), 0.4);
  EXPECT_EQ(r.score_ppm(), 400'000u);
  r.assigned = 1;
  r.valid = 0;
  EXPECT_EQ(r.score_ppm(), 333'333u);
}

TEST(Market, ProposeEscrowsRewardAndBiddingCloses) {
  World w;
  auto purchaser = w.ledger.create_account(TokenAmount{1000});
  auto id = w.market.propose_sla(purchaser, numeric_proposal(2));
  EXPECT_EQ(w.ledger.balance(purchaser), TokenAmount{900});
  EXPECT_EQ(w.ledger.escrowed_by(purchaser), TokenAmount{100});
  EXPECT_EQ(w.market.sla(id).status, SlaStatus::kBidding);
  EXPECT_TRUE(w.market.bidding_open(id));
  EXPECT_ERROR_CODE(w.market.finalize_sla(id), ErrorCode::kWindowOpen);
  w.advance_to(w.market.sla(id).bidding_closes());
  EXPECT_FALSE(w.market.bidding_open(id));
  auto late = w.ledger.create_account(TokenAmount{50});
  EXPECT_ERROR_CODE(w.market.submit_bid(late, id), ErrorCode::kWindowClosed);
  EXPECT_ERROR_CODE(w.market.sla(99), ErrorCode::kUnknownSla);
}

TEST(Market, ProposeWithoutFunds) {
  World w;
  auto poor = w.ledger.create_account(TokenAmount{99});
  EXPECT_ERROR_CODE(w.market.propose_sla(poor, numeric_proposal(1)), ErrorCode::kInsufficientFunds);
  EXPECT_EQ(w.market.size(), 0u);
}

TEST(Market, BidChecks) {
  World w;
  auto purchaser = w.ledger.create_account(TokenAmount{1000});
  auto p = numeric_proposal(1);
  p.min_reputation = 0.6;
  auto id = w.market.propose_sla(purchaser, p);
  auto o = w.ledger.create_account(TokenAmount{100});
  EXPECT_ERROR_CODE(w.market.submit_bid(o, id), ErrorCode::kUnqualified);  // fresh score is 0.5
  auto id2 = w.market.propose_sla(purchaser, numeric_proposal(1));
  auto broke = w.ledger.create_account(TokenAmount{9});
  EXPECT_ERROR_CODE(w.market.submit_bid(broke, id2), ErrorCode::kInsufficientFunds);
  w.market.submit_bid(o, id2);
  EXPECT_EQ(w.ledger.balance(o), TokenAmount{90});
  EXPECT_ERROR_CODE(w.market.submit_bid(o, id2), ErrorCode::kDuplicate);
}

TEST(Market, SelectionOrderAndRefunds) {
  World w;
  auto purchaser = w.ledger.create_account(TokenAmount{10'000});
  auto oracles = w.accounts(4, 100);
  // Give oracles[3] a track record: one valid result out of one.
  w.reputation.on_assigned(oracles[3]);
  w.reputation.on_result(oracles[3], true, true);
  auto id = w.market.propose_sla(purchaser, numeric_proposal(2));
  w.market.submit_bid(oracles[2], id);
  w.ledger.advance_block();
  w.market.submit_bid(oracles[0], id);
  w.market.submit_bid(oracles[3], id);
  w.market.submit_bid(oracles[1], id);
  w.advance_to(w.market.sla(id).bidding_closes());
  const auto& s = w.market.finalize_sla(id);
  ASSERT_EQ(s.status, SlaStatus::kActive);
  // best score first, then earliest bid
  EXPECT_EQ(s.selected, (std::vector<Address>{oracles[3], oracles[2]}));
  EXPECT_EQ(w.ledger.balance(oracles[0]), TokenAmount{100});
  EXPECT_EQ(w.ledger.balance(oracles[1]), TokenAmount{100});
  EXPECT_EQ(w.ledger.balance(oracles[2]), TokenAmount{90});
  EXPECT_EQ(w.reputation.record(oracles[2]).assigned, 1u);
  EXPECT_EQ(w.reputation.record(oracles[0]).assigned, 0u);
  EXPECT_ERROR_CODE(w.market.finalize_sla(id), ErrorCode::kWrongStatus);
}

TEST(Market, SameHeightTieBreaksByAddress) {
  World w;
  auto purchaser = w.ledger.create_account(TokenAmount{1000});
  auto oracles = w.accounts(3, 100);
  auto id = w.market.propose_sla(purchaser, numeric_proposal(1));
  w.market.submit_bid(oracles[2], id);
  w.market.submit_bid(oracles[0], id);
  w.market.submit_bid(oracles[1], id);
  w.advance_to(w.market.sla(id).bidding_closes());
  auto lowest = std::min({oracles[0], oracles[1], oracles[2]});
  EXPECT_EQ(w.market.finalize_sla(id).selected, std::vector<Address>{lowest});
}

TEST(Market, TooFewBidsVoidsAndRefunds) {
  World w;
  auto purchaser = w.ledger.create_account(TokenAmount{1000});
  auto o = w.ledger.create_account(TokenAmount{100});
  auto id = w.market.propose_sla(purchaser, numeric_proposal(2));
  w.market.submit_bid(o, id);
  w.advance_to(w.market.sla(id).bidding_closes());
  EXPECT_EQ(w.market.finalize_sla(id).status, SlaStatus::kVoided);
  EXPECT_EQ(w.ledger.balance(purchaser), TokenAmount{1000});
  EXPECT_EQ(w.ledger.balance(o), TokenAmount{100});
  EXPECT_TRUE(w.ledger.conserved());
}

TEST(Market, RequestFundVoid) {
  World w;
  auto purchaser = w.ledger.create_account(TokenAmount{1000});
  auto id = w.market.request_sla(purchaser, numeric_proposal(1));
  EXPECT_EQ(w.market.sla(id).status, SlaStatus::kPending);
  EXPECT_EQ(w.ledger.balance(purchaser), TokenAmount{1000});
  w.market.fund_sla(id);
  EXPECT_EQ(w.market.sla(id).status, SlaStatus::kBidding);
  EXPECT_ERROR_CODE(w.market.fund_sla(id), ErrorCode::kWrongStatus);
  EXPECT_ERROR_CODE(w.market.void_request(id, "late"), ErrorCode::kWrongStatus);
  auto id2 = w.market.request_sla(purchaser, numeric_proposal(1));
  w.market.void_request(id2, "payment failed");
  EXPECT_EQ(w.market.sla(id2).status, SlaStatus::kVoided);
  EXPECT_EQ(w.ledger.read_events({"sla_voided"}).size(), 1u);
}

TEST(Market, ManualMatching) {
  World w;
  auto purchaser = w.ledger.create_account(TokenAmount{1000});
  auto oracles = w.accounts(2, 100);
  EXPECT_ERROR_CODE(w.market.propose_manual(purchaser, numeric_proposal(2), {oracles[0]}), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(w.market.propose_manual(purchaser, numeric_proposal(2), {oracles[0], oracles[0]}),
                    ErrorCode::kDuplicate);
  auto id = w.market.propose_manual(purchaser, numeric_proposal(2), oracles);
  const auto& s = w.market.sla(id);
  EXPECT_EQ(s.status, SlaStatus::kActive);
  EXPECT_EQ(s.selected, oracles);
  EXPECT_EQ(w.ledger.balance(oracles[0]), TokenAmount{90});
}

TEST(Market, ValidityPaysSharesAndForfeits) {
  World w;
  auto purchaser = w.ledger.create_account(TokenAmount{1000});
  auto oracles = w.accounts(3, 100);
  auto id = w.market.propose_manual(purchaser, numeric_proposal(3, 10, 100), oracles);
  EXPECT_ERROR_CODE(w.market.record_validity(id, oracles[0], true), ErrorCode::kWrongStatus);
  w.market.mark_aggregated(id);
  EXPECT_ERROR_CODE(w.market.mark_aggregated(id), ErrorCode::kAlreadyFinalized);
  auto stranger = w.ledger.create_account(TokenAmount{0});
  EXPECT_ERROR_CODE(w.market.record_validity(id, stranger, true), ErrorCode::kNotSelected);
  w.market.record_validity(id, oracles[0], true);
  EXPECT_ERROR_CODE(w.market.record_validity(id, oracles[0], false), ErrorCode::kDuplicate);
  w.market.record_validity(id, oracles[1], false);
  EXPECT_EQ(w.market.sla(id).status, SlaStatus::kAggregated);
  w.market.record_validity(id, oracles[2], true, true);
  EXPECT_EQ(w.market.sla(id).status, SlaStatus::kSettled);
  // share = 100 / 3 = 33; two valid oracles paid, remainder 34 back to purchaser plus one forfeited penalty.
  EXPECT_EQ(w.ledger.balance(oracles[0]), TokenAmount{133});
  EXPECT_EQ(w.ledger.balance(oracles[1]), TokenAmount{90});
  EXPECT_EQ(w.ledger.balance(oracles[2]), TokenAmount{133});
  EXPECT_EQ(w.ledger.balance(purchaser), TokenAmount{900 + 34 + 10});
  EXPECT_EQ(w.reputation.record(oracles[1]).penalized, 1u);
  EXPECT_EQ(w.ledger.balance(w.market.address()), TokenAmount{0});
  EXPECT_TRUE(w.ledger.conserved());
}

TEST(MarketProperty, ConservationAcrossRandomLifecycles) {
  oraclesim::testing::Gen g(77);
  World w;
  w.ledger.set_flat_fee(TokenAmount{1});
  auto oracles = w.accounts(12, 500);
  auto purchaser = w.ledger.create_account(TokenAmount{100'000});
  for (int round = 0; round < 60; ++round) {
    auto n = static_cast<std::uint32_t>(g.range(1, 5));
    auto id = w.market.propose_sla(purchaser, numeric_proposal(n, g.range(0, 20), g.range(0, 200)));
    for (const auto& o : oracles) {
      if (g.range(0, 2) == 0) continue;
      try {
        w.market.submit_bid(o, id);
      } catch (const Error&) {
      }
    }
    w.advance_to(w.market.sla(id).bidding_closes());
    const auto& s = w.market.finalize_sla(id);
    ASSERT_TRUE(w.ledger.conserved());
    if (s.status == SlaStatus::kVoided) continue;
    w.market.mark_aggregated(id);
    auto selected = s.selected;
    for (const auto& o : selected) w.market.record_validity(id, o, g.coin());
    ASSERT_EQ(w.market.sla(id).status, SlaStatus::kSettled);
    ASSERT_EQ(w.market.sla(id).validity.size(), selected.size());
    ASSERT_TRUE(w.ledger.conserved());
    ASSERT_EQ(w.ledger.balance(w.market.address()), TokenAmount{0});
  }
}

}  // namespace
}  // namespace oraclesim::market
