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

// Batch kernels in two flavours. The serial versions are the reference the
// OpenMP versions are tested and benchmarked against; results are identical.

#include <span>
#include <vector>

#include "oraclesim/aggregate.hpp"
#include "oraclesim/bytes.hpp"
#include "oraclesim/ledger.hpp"
#include "oraclesim/node.hpp"

namespace oraclesim::kernels {

std::vector<Digest> merkle_leaves_serial(std::span<const Bytes> data, std::span<const Digest> salts);
std::vector<Digest> merkle_leaves_parallel(std::span<const Bytes> data, std::span<const Digest> salts);

/// One level up. `level` must have even length.
std::vector<Digest> merkle_parents_serial(std::span<const Digest> level);
std::vector<Digest> merkle_parents_parallel(std::span<const Digest> level);

struct CommitmentInput {
  std::uint64_t sla = 0;
  ledger::Address oracle;
  reporting::AnswerValue value;
  Digest salt{};
};

std::vector<Digest> commitment_digests_serial(std::span<const CommitmentInput> inputs);
std::vector<Digest> commitment_digests_parallel(std::span<const CommitmentInput> inputs);

/// results[i] = nodes[i]->run_assignment(assignments[i]).
std::vector<node::PipelineResult> run_assignments_serial(std::span<const node::Node* const> nodes,
                                                         std::span<const node::Assignment> assignments);
std::vector<node::PipelineResult> run_assignments_parallel(std::span<const node::Node* const> nodes,
                                                           std::span<const node::Assignment> assignments);

}  // namespace oraclesim::kernels
