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

#include "oraclesim/kernels.hpp"

#include <exception>

#include "oraclesim/error.hpp"
#include "oraclesim/merkle.hpp"
#include "oraclesim/reporting.hpp"

namespace oraclesim::kernels {

namespace {

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": length mismatch");
}

// Runs body(i) for i in [0, n), in parallel when asked. Exceptions cannot
// leave an OpenMP region, so the first one is parked and rethrown.
template <typename Body>
void for_each_index(std::size_t n, bool parallel, Body&& body) {
  std::exception_ptr failure;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(oraclesim_kernel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<Digest> leaves(std::span<const Bytes> data, std::span<const Digest> salts, bool parallel) {
  check_sizes(data.size(), salts.size(), "merkle leaves");
  std::vector<Digest> out(data.size());
  for_each_index(data.size(), parallel, [&](std::size_t i) { out[i] = patterns::merkle_leaf(data[i], salts[i]); });
  return out;
}

std::vector<Digest> parents(std::span<const Digest> level, bool parallel) {
  if (level.size() % 2 != 0) throw Error(ErrorCode::kInvalidArgument, "merkle level must have even length");
  std::vector<Digest> out(level.size() / 2);
  for_each_index(out.size(), parallel,
                 [&](std::size_t i) { out[i] = patterns::merkle_interior(level[2 * i], level[2 * i + 1]); });
  return out;
}

std::vector<Digest> commitments(std::span<const CommitmentInput> inputs, bool parallel) {
  std::vector<Digest> out(inputs.size());
  for_each_index(inputs.size(), parallel, [&](std::size_t i) {
    const auto& in = inputs[i];
    out[i] = reporting::commitment_digest(in.sla, in.oracle, in.value, in.salt);
  });
  return out;
}

std::vector<node::PipelineResult> runs(std::span<const node::Node* const> nodes,
                                       std::span<const node::Assignment> assignments, bool parallel) {
  check_sizes(nodes.size(), assignments.size(), "run_assignments");
  std::vector<node::PipelineResult> out(nodes.size());
  for_each_index(nodes.size(), parallel, [&](std::size_t i) { out[i] = nodes[i]->run_assignment(assignments[i]); });
  return out;
}

}  // namespace

std::vector<Digest> merkle_leaves_serial(std::span<const Bytes> data, std::span<const Digest> salts) {
  return leaves(data, salts, false);
}
std::vector<Digest> merkle_leaves_parallel(std::span<const Bytes> data, std::span<const Digest> salts) {
  return leaves(data, salts, true);
}
std::vector<Digest> merkle_parents_serial(std::span<const Digest> level) { return parents(level, false); }
std::vector<Digest> merkle_parents_parallel(std::span<const Digest> level) { return parents(level, true); }

std::vector<Digest> commitment_digests_serial(std::span<const CommitmentInput> inputs) {
  return commitments(inputs, false);
}
std::vector<Digest> commitment_digests_parallel(std::span<const CommitmentInput> inputs) {
  return commitments(inputs, true);
}

std::vector<node::PipelineResult> run_assignments_serial(std::span<const node::Node* const> nodes,
                                                         std::span<const node::Assignment> assignments) {
  return runs(nodes, assignments, false);
}
std::vector<node::PipelineResult> run_assignments_parallel(std::span<const node::Node* const> nodes,
                                                           std::span<const node::Assignment> assignments) {
  return runs(nodes, assignments, true);
}

}  // namespace oraclesim::kernels
