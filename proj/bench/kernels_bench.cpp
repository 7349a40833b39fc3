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


// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "oraclesim/kernels.hpp"
#include "oraclesim/network.hpp"
#include "support/gen.hpp"

namespace {

using namespace oraclesim;
using testing::Gen;

struct LeafInput {
  std::vector<Bytes> data;
  std::vector<Digest> salts;
};

LeafInput leaves(std::size_t n) {
  Gen g(n);
  LeafInput in;
  for (std::size_t i = 0; i < n; ++i) {
    in.data.push_back(g.bytes(64));
    in.salts.push_back(g.digest());
  }
  return in;
}

template <auto Kernel>
void BM_MerkleLeaves(benchmark::State& state) {
  auto in = leaves(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(in.data, in.salts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_MerkleParents(benchmark::State& state) {
  Gen g(1);
  std::vector<Digest> level(static_cast<std::size_t>(state.range(0)));
  for (auto& d : level) d = g.digest();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(level));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_Commitments(benchmark::State& state) {
  Gen g(2);
  std::vector<kernels::CommitmentInput> in(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < in.size(); ++i) {
    in[i].sla = i;
    in[i].oracle.id[0] = static_cast<std::uint8_t>(i);
    in[i].value = reporting::Numeric{static_cast<std::int64_t>(g.u64() >> 1)};
    in[i].salt = g.digest();
  }
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(in));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_Assignments(benchmark::State& state) {
  Network net(3, std::make_shared<const query::FixtureRegistry>(
                     query::FixtureRegistry::load_manifest(testing::fixture_manifest())));
  market::SlaProposal p;
  p.query.source = query::DataSourceType::kUrl;
  p.query.params = {"https://api.kraken.com/0/public/Ticker?pair=ETHUSD"};
  p.query.helpers = {query::ParsingHelper::json("result.XETHZUSD.c.0")};
  p.query.mirrors = {"https://mirror.example.org/0/public/Ticker?pair=ETHUSD"};
  p.oracles_needed = 1;
  p.decimals = 2;
  std::vector<const node::Node*> nodes;
  std::vector<node::Assignment> assignments;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    auto& n = net.add_node(ledger::TokenAmount{10});
    nodes.push_back(&n);
    assignments.push_back(n.build_assignment(static_cast<market::SlaId>(i), p));
  }
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(nodes, assignments));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK_TEMPLATE(BM_MerkleLeaves, kernels::merkle_leaves_serial)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK_TEMPLATE(BM_MerkleLeaves, kernels::merkle_leaves_parallel)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK_TEMPLATE(BM_MerkleParents, kernels::merkle_parents_serial)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK_TEMPLATE(BM_MerkleParents, kernels::merkle_parents_parallel)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK_TEMPLATE(BM_Commitments, kernels::commitment_digests_serial)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK_TEMPLATE(BM_Commitments, kernels::commitment_digests_parallel)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK_TEMPLATE(BM_Assignments, kernels::run_assignments_serial)->Arg(16)->Arg(128);
BENCHMARK_TEMPLATE(BM_Assignments, kernels::run_assignments_parallel)->Arg(16)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
