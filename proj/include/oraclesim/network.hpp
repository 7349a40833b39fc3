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

#include <memory>
#include <vector>

#include "oraclesim/ledger.hpp"
#include "oraclesim/market.hpp"
#include "oraclesim/node.hpp"
#include "oraclesim/query.hpp"
#include "oraclesim/reporting.hpp"

namespace oraclesim {

/// One ledger with the market, reputation and aggregating contracts wired
/// together, plus the off-chain nodes that serve them.
class Network {
 public:
  Network(std::uint64_t seed, std::shared_ptr<const query::FixtureRegistry> fixtures);
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  ledger::Ledger ledger;
  market::ReputationContract reputation{ledger};
  market::Market market{ledger, reputation};
  reporting::Reporting reporting{ledger, market};

  std::uint64_t seed() const { return seed_; }
  query::QueryEngine& engine() { return *engine_; }
  const std::shared_ptr<query::QueryEngine>& engine_ptr() const { return engine_; }

  node::Node& add_node(ledger::TokenAmount balance, node::BehaviorSpec behavior = {});
  const std::vector<std::unique_ptr<node::Node>>& nodes() const { return nodes_; }
  node::Node* find_node(const ledger::Address& address);

  /// Every node that is qualified and can afford the penalty bids, in index
  /// order. Returns the number of bids placed.
  std::size_t collect_bids(market::SlaId id);

  /// Run node pipelines with the OpenMP kernel (default) or the serial one.
  bool parallel_pipelines = true;

 private:
  std::uint64_t seed_;
  std::shared_ptr<query::QueryEngine> engine_;
  std::vector<std::unique_ptr<node::Node>> nodes_;
};

}  // namespace oraclesim
