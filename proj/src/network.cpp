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

#include "oraclesim/network.hpp"

#include "oraclesim/error.hpp"

namespace oraclesim {

Network::Network(std::uint64_t seed, std::shared_ptr<const query::FixtureRegistry> fixtures)
    : seed_(seed),
      engine_(std::make_shared<query::QueryEngine>(seed, std::move(fixtures))) {}

node::Node& Network::add_node(ledger::TokenAmount balance, node::BehaviorSpec behavior) {
  ledger::Address address = ledger.create_account(balance);
  nodes_.push_back(std::make_unique<node::Node>(nodes_.size(), address, seed_, engine_, std::move(behavior)));
  return *nodes_.back();
}

node::Node* Network::find_node(const ledger::Address& address) {
  for (auto& n : nodes_) {
    if (n->address() == address) return n.get();
  }
  return nullptr;
}

std::size_t Network::collect_bids(market::SlaId id) {
  std::size_t placed = 0;
  for (auto& n : nodes_) {
    try {
      market.submit_bid(n->address(), id);
      ++placed;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnqualified && e.code() != ErrorCode::kInsufficientFunds) throw;
    }
  }
  return placed;
}

}  // namespace oraclesim
