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

#include "oraclesim/crypto.hpp"
#include "oraclesim/error.hpp"
#include "support/world.hpp"

namespace oraclesim::reporting {
namespace {

using ledger::TokenAmount;
using market::SlaId;
using oraclesim::testing::Gen;
using oraclesim::testing::World;

struct Round {
  World w;
  Address purchaser;
  std::vector<Address> oracles;
  SlaId id = 0;

  explicit Round(market::SlaProposal p) {
    purchaser = w.ledger.create_account(TokenAmount{10'000});
    oracles = w.accounts(p.oracles_needed, 100);
    id = w.market.propose_manual(purchaser, p, oracles);
  }
  const market::FinalizedSla& sla() const { return w.market.sla(id); }
  void to_reveal() { w.advance_to(sla().commit_closes()); }
  void to_close() { w.advance_to(sla().reveal_closes()); }
  void commit(std::size_t i, const AnswerValue& v, const Digest& salt) {
    w.reporting.commit(id, oracles[i], commitment_digest(id, oracles[i], v, salt));
  }
};

TEST(CommitmentDigest, MatchesManualPreimage) {
  Address a;
  a.id[0] = 7;
  Digest salt{};
  salt[31] = 1;
  Bytes pre = to_bytes("ORACLE-COMMIT-V1");
  append_be64(pre, 5);
  append(pre, a.id);
  append(pre, canon(Numeric{3}));
  append(pre, salt);
  EXPECT_EQ(commitment_digest(5, a, Numeric{3}, salt), crypto::sha256(pre));
}

TEST(Reporting, PhasesFollowWindows) {
  auto p = oraclesim::testing::numeric_proposal(1);
  p.commit_window = 3;
  p.reveal_window = 2;
  Round r(p);
  EXPECT_EQ(r.w.reporting.phase(r.id), Phase::kCommit);
  r.w.advance_to(r.sla().finalized_at + 2);
  EXPECT_EQ(r.w.reporting.phase(r.id), Phase::kCommit);
  r.w.ledger.advance_block();
  EXPECT_EQ(r.w.reporting.phase(r.id), Phase::kReveal);
  r.w.ledger.advance_block();
  r.w.ledger.advance_block();
  EXPECT_EQ(r.w.reporting.phase(r.id), Phase::kClosed);
}

TEST(Reporting, CommitRevealAggregate) {
  Round r(oraclesim::testing::numeric_proposal(3));
  Gen g(1);
  std::vector<Digest> salts{g.digest(), g.digest(), g.digest()};
  std::vector<std::int64_t> values{10, 12, 500};
  for (std::size_t i = 0; i < 3; ++i) r.commit(i, Numeric{values[i]}, salts[i]);
  EXPECT_ERROR_CODE(r.commit(0, Numeric{1}, salts[0]), ErrorCode::kDuplicate);
  EXPECT_ERROR_CODE(r.w.reporting.reveal(r.id, r.oracles[0], Numeric{10}, salts[0]), ErrorCode::kPhaseClosed);
  r.to_reveal();
  EXPECT_ERROR_CODE(r.commit(1, Numeric{1}, salts[0]), ErrorCode::kPhaseClosed);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r.w.reporting.reveal(r.id, r.oracles[i], Numeric{values[i]}, salts[i]), RevealOutcome::kAccepted);
  }
  EXPECT_ERROR_CODE(r.w.reporting.reveal(r.id, r.oracles[0], Numeric{10}, salts[0]), ErrorCode::kDuplicate);
  EXPECT_ERROR_CODE(r.w.reporting.finalize_aggregation(r.id), ErrorCode::kWindowOpen);
  r.to_close();
  const auto& res = r.w.reporting.finalize_aggregation(r.id);
  EXPECT_EQ(std::get<Numeric>(res.answer).raw, 12);
  ASSERT_NE(r.w.reporting.delivered(r.id), nullptr);
  EXPECT_EQ(r.sla().status, market::SlaStatus::kSettled);
  EXPECT_TRUE(r.sla().validity.at(r.oracles[0]));
  EXPECT_FALSE(r.sla().validity.at(r.oracles[2]));
  EXPECT_ERROR_CODE(r.w.reporting.finalize_aggregation(r.id), ErrorCode::kAlreadyFinalized);
  EXPECT_TRUE(r.w.ledger.conserved());
}

TEST(Reporting, MismatchMarksInvalidAndBlocksRetry) {
  Round r(oraclesim::testing::boolean_proposal(2, 3));
  Gen g(2);
  Digest s0 = g.digest(), s1 = g.digest(), s2 = g.digest();
  r.commit(0, true, s0);
  r.commit(1, true, s1);
  r.commit(2, true, s2);
  r.to_reveal();
  EXPECT_EQ(r.w.reporting.reveal(r.id, r.oracles[0], false, s0), RevealOutcome::kDigestMismatch);
  EXPECT_ERROR_CODE(r.w.reporting.reveal(r.id, r.oracles[0], true, s0), ErrorCode::kDuplicate);
  EXPECT_EQ(r.w.reporting.reveal(r.id, r.oracles[1], true, s1), RevealOutcome::kAccepted);
  EXPECT_EQ(r.w.reporting.reveal(r.id, r.oracles[2], true, s2), RevealOutcome::kAccepted);
  EXPECT_FALSE(r.w.reporting.revealed_value(r.id, r.oracles[0]).has_value());
  r.to_close();
  const auto& res = r.w.reporting.finalize_aggregation(r.id);
  EXPECT_EQ(res.answer, AnswerValue{true});
  EXPECT_FALSE(r.sla().validity.at(r.oracles[0]));
  EXPECT_TRUE(r.sla().validity.at(r.oracles[1]));
  EXPECT_EQ(r.w.reputation.record(r.oracles[0]).completed, 0u);
}

TEST(Reporting, NonSelectedAndMissingCommit) {
  Round r(oraclesim::testing::numeric_proposal(2));
  auto outsider = r.w.ledger.create_account(TokenAmount{1});
  EXPECT_ERROR_CODE(r.w.reporting.commit(r.id, outsider, Digest{}), ErrorCode::kNotSelected);
  r.to_reveal();
  EXPECT_ERROR_CODE(r.w.reporting.reveal(r.id, r.oracles[1], Numeric{1}, Digest{}), ErrorCode::kNoCommitment);
  r.to_close();
  // Nobody revealed: numeric result undecided, every oracle invalid, penalties forfeited.
  const auto& res = r.w.reporting.finalize_aggregation(r.id);
  EXPECT_FALSE(res.decided());
  EXPECT_EQ(r.w.ledger.balance(r.purchaser), TokenAmount{10'000 + 20});
}

TEST(Reporting, WrongKindRevealIsInvalid) {
  Round r(oraclesim::testing::numeric_proposal(1));
  Digest s{};
  r.commit(0, true, s);
  r.to_reveal();
  EXPECT_EQ(r.w.reporting.reveal(r.id, r.oracles[0], true, s), RevealOutcome::kAccepted);
  r.to_close();
  r.w.reporting.finalize_aggregation(r.id);
  EXPECT_FALSE(r.sla().validity.at(r.oracles[0]));
}

TEST(ReportingProperty, AlteredValueOrSaltNeverAccepted) {
  Gen g(99);
  for (int round = 0; round < 200; ++round) {
    Round r(oraclesim::testing::numeric_proposal(1));
    std::int64_t v = g.signed_range(-1'000'000, 1'000'000);
    Digest salt = g.digest();
    r.commit(0, Numeric{v}, salt);
    r.to_reveal();
    int which = static_cast<int>(g.range(0, 2));
    Numeric shown{which == 0 ? v + g.signed_range(1, 1000) : v};
    Digest shown_salt = salt;
    if (which == 1) shown_salt[g.range(0, 31)] ^= static_cast<std::uint8_t>(g.range(1, 255));
    auto outcome = r.w.reporting.reveal(r.id, r.oracles[0], shown, shown_salt);
    ASSERT_EQ(outcome, which == 2 ? RevealOutcome::kAccepted : RevealOutcome::kDigestMismatch);
  }
}

}  // namespace
}  // namespace oraclesim::reporting
