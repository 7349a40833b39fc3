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

#include <sstream>
#include <thread>

#include "oraclesim/error.hpp"
#include "oraclesim/ledger.hpp"
#include "support/gen.hpp"

namespace oraclesim::ledger {
namespace {

using oraclesim::testing::Gen;

TEST(TokenAmount, CheckedArithmetic) {
  EXPECT_EQ((TokenAmount{3} + TokenAmount{4}).units(), 7u);
  EXPECT_EQ((TokenAmount{4} - TokenAmount{4}).units(), 0u);
  EXPECT_ERROR_CODE(TokenAmount{3} - TokenAmount{4}, ErrorCode::kOverflow);
  EXPECT_ERROR_CODE(TokenAmount{UINT64_MAX} + TokenAmount{1}, ErrorCode::kOverflow);
}

TEST(Ledger, AccountsAreDeterministicAndDistinct) {
  Ledger a, b;
  auto a0 = a.create_account(TokenAmount{5});
  auto a1 = a.create_account(TokenAmount{0});
  EXPECT_EQ(a0, b.create_account(TokenAmount{9}));
  EXPECT_NE(a0, a1);
  EXPECT_EQ(a.balance(a0).units(), 5u);
  EXPECT_EQ(a.total_supply().units(), 5u);
}

TEST(Ledger, TransferMovesTokens) {
  Ledger l;
  auto x = l.create_account(TokenAmount{100});
  auto y = l.create_account(TokenAmount{0});
  l.transfer(x, y, TokenAmount{30});
  EXPECT_EQ(l.balance(x).units(), 70u);
  EXPECT_EQ(l.balance(y).units(), 30u);
  EXPECT_ERROR_CODE(l.transfer(x, y, TokenAmount{71}), ErrorCode::kInsufficientFunds);
  Address ghost;
  ghost.id[0] = 0xee;
  EXPECT_ERROR_CODE(l.transfer(x, ghost, TokenAmount{1}), ErrorCode::kUnknownAddress);
  EXPECT_ERROR_CODE(l.balance(ghost), ErrorCode::kUnknownAddress);
}

TEST(Ledger, EscrowAndRelease) {
  Ledger l;
  auto owner = l.create_account(TokenAmount{50});
  auto holder = l.register_contract("holder");
  auto other = l.create_account(TokenAmount{0});
  EscrowId e = l.escrow(owner, holder, TokenAmount{20});
  EXPECT_EQ(l.balance(owner).units(), 30u);
  EXPECT_EQ(l.escrowed_by(owner).units(), 20u);
  EXPECT_EQ(l.total_open_escrows().units(), 20u);
  EXPECT_TRUE(l.conserved());
  l.release(e, other);
  EXPECT_EQ(l.balance(other).units(), 20u);
  EXPECT_EQ(l.escrowed_by(owner).units(), 0u);
  EXPECT_ERROR_CODE(l.release(e, other), ErrorCode::kEscrowClosed);
  EXPECT_ERROR_CODE(l.release(99, other), ErrorCode::kUnknownEscrow);
  EXPECT_ERROR_CODE(l.escrow(owner, holder, TokenAmount{31}), ErrorCode::kInsufficientFunds);
}

TEST(Ledger, ContractsHaveStableNames) {
  Ledger l;
  auto c = l.register_contract("market");
  EXPECT_EQ(l.contract("market"), c);
  EXPECT_FALSE(l.contract("nope").has_value());
  EXPECT_ERROR_CODE(l.register_contract("market"), ErrorCode::kDuplicate);
  Ledger other;
  EXPECT_EQ(other.register_contract("market"), c);
}

TEST(Ledger, FlatFeeGoesToSinkAndSkipsContracts) {
  Ledger l;
  auto x = l.create_account(TokenAmount{100});
  auto c = l.register_contract("c");
  l.set_flat_fee(TokenAmount{2});
  l.transfer(x, c, TokenAmount{10});
  EXPECT_EQ(l.balance(x).units(), 88u);
  EXPECT_EQ(l.balance(l.fee_sink()).units(), 2u);
  l.transfer(c, x, TokenAmount{10});  // contracts pay no fee
  EXPECT_EQ(l.balance(c).units(), 0u);
  EXPECT_EQ(l.balance(l.fee_sink()).units(), 2u);
  EXPECT_TRUE(l.conserved());
}

TEST(Ledger, EventSequenceResetsPerBlock) {
  Ledger l;
  l.set_token_events(false);
  auto c = l.register_contract("c");
  EXPECT_EQ(l.emit(c, "a", "x").seq, 0u);
  EXPECT_EQ(l.emit(c, "b", "y").seq, 1u);
  l.advance_block();
  const auto& e = l.emit(c, "a", "z");
  EXPECT_EQ(e.seq, 0u);
  EXPECT_EQ(e.height.value, 1u);
}

TEST(Ledger, FiltersByTopicPrefixAndRange) {
  Ledger l;
  l.set_token_events(false);
  auto c = l.register_contract("c");
  l.emit(c, "rr_step_1", "0");
  l.advance_block();
  l.emit(c, "rr_step_2", "0");
  l.emit(c, "other", "0");
  l.advance_block();
  l.emit(c, "rr_step_3", "0");
  EXPECT_EQ(l.read_events({"rr_step_*"}).size(), 3u);
  EXPECT_EQ(l.read_events({"rr_step_*", BlockHeight{1}, BlockHeight{1}}).size(), 1u);
  EXPECT_EQ(l.read_events({"other"}).size(), 1u);
  EXPECT_EQ(l.read_events({"*"}).size(), 4u);
}

TEST(Ledger, EventLineRoundTrip) {
  Ledger l;
  auto c = l.register_contract("c");
  l.advance_block();
  const LedgerEvent e = l.emit(c, "topic", std::string_view("{\"a\":1}"));
  EXPECT_EQ(parse_event(format_event(e)), e);
  LedgerEvent empty = l.emit(c, "empty", Bytes{});
  EXPECT_EQ(parse_event(format_event(empty)), empty);
  EXPECT_ERROR_CODE(parse_event("1 2 zz topic 00"), ErrorCode::kMalformedLog);
  EXPECT_ERROR_CODE(parse_event("1 2"), ErrorCode::kMalformedLog);
  EXPECT_ERROR_CODE(parse_event("x 0 " + c.hex() + " t 00"), ErrorCode::kMalformedLog);
}

TEST(Ledger, TokenEventsMirrorMovements) {
  Ledger l;
  auto x = l.create_account(TokenAmount{10});
  auto y = l.create_account(TokenAmount{0});
  l.transfer(x, y, TokenAmount{1});
  auto e = l.escrow(x, y, TokenAmount{2});
  l.release(e, y);
  EXPECT_EQ(l.read_events({"mint"}).size(), 2u);
  EXPECT_EQ(l.read_events({"transfer"}).size(), 1u);
  EXPECT_EQ(l.read_events({"escrow"}).size(), 1u);
  EXPECT_EQ(l.read_events({"release"}).size(), 1u);
  std::ostringstream out;
  l.export_log(out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(l.events().size()));
}

// Random sequences of transfers, escrows and releases never create or
// destroy tokens, whatever fails along the way.
TEST(LedgerProperty, ConservationUnderRandomOperations) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Gen g(seed);
    Ledger l;
    if (g.coin()) l.set_flat_fee(TokenAmount{g.range(1, 3)});
    std::vector<Address> accounts;
    for (int i = 0; i < 6; ++i) accounts.push_back(l.create_account(TokenAmount{g.range(0, 200)}));
    accounts.push_back(l.register_contract("holder"));
    std::vector<EscrowId> open;
    for (int step = 0; step < 300; ++step) {
      try {
        switch (g.range(0, 3)) {
          case 0: l.transfer(g.pick(accounts), g.pick(accounts), TokenAmount{g.range(0, 80)}); break;
          case 1: open.push_back(l.escrow(g.pick(accounts), accounts.back(), TokenAmount{g.range(0, 80)})); break;
          case 2:
            if (!open.empty()) l.release(open[g.range(0, open.size() - 1)], g.pick(accounts));
            break;
          case 3: l.advance_block(); break;
        }
      } catch (const Error&) {
      }
      ASSERT_TRUE(l.conserved()) << "seed " << seed << " step " << step;
    }
    l.check_conservation();
  }
}

TEST(LedgerQueue, ConcurrentReadsSeeCommittedState) {
  LedgerQueue q;
  auto x = q.transact([](Ledger& l) { return l.create_account(TokenAmount{1000}); });
  auto y = q.transact([](Ledger& l) { return l.create_account(TokenAmount{0}); });
  std::thread writer([&] {
    for (int i = 0; i < 200; ++i) q.transact([&](Ledger& l) { l.transfer(x, y, TokenAmount{1}); });
  });
  std::thread reader([&] {
    for (int i = 0; i < 200; ++i) {
      bool ok = q.read([](const Ledger& l) { return l.conserved(); });
      EXPECT_TRUE(ok);
    }
  });
  writer.join();
  reader.join();
  EXPECT_EQ(q.read([&](const Ledger& l) { return l.balance(y).units(); }), 200u);
}

}  // namespace
}  // namespace oraclesim::ledger
