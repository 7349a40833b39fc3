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

#include <optional>
#include <string>
#include <vector>

#include "oraclesim/crypto.hpp"
#include "oraclesim/network.hpp"

namespace oraclesim::patterns {

struct RrSchedule {
  std::uint64_t interval = 0;     // blocks between cycle starts
  ledger::BlockHeight until;      // no cycle starts at or after this height
};

struct RrCycle {
  market::SlaId sla = 0;
  ledger::BlockHeight started;
  bool aborted = false;
  std::string abort_reason;
  std::optional<reporting::AggregationResult> result;
  ledger::BlockHeight delivered_at;
  Bytes sealed_result;  // answer JSON sealed to the purchaser, when asked
};

/// Request-response lifecycle as a per-block state machine. Call tick() once
/// per block, before the block advances. Emits `rr_step_1` .. `rr_step_7`
/// (payload: the decimal SLA id) as the request moves through:
///   1 request recorded, 2 request logged for the oracles, 3 payment checked
///   and the assignment routed to the selected nodes, 4 nodes fetch, 5 nodes
///   hold processed results, 6 nodes report, 7 aggregated answer delivered.
/// A failed payment check or a void auction emits `rr_step_3_failed`.
class RequestResponse {
 public:
  RequestResponse(Network& net, ledger::Address purchaser, market::SlaProposal proposal,
                  std::optional<RrSchedule> schedule = std::nullopt,
                  std::optional<crypto::PublicKey> encrypt_to = std::nullopt);

  void tick();
  bool done() const { return stage_ == Stage::kDone; }
  const std::vector<RrCycle>& cycles() const { return cycles_; }
  /// The SLA of the cycle currently running, if any.
  std::optional<market::SlaId> active_sla() const;

 private:
  enum class Stage { kIdle, kBidding, kCommit, kReveal, kDone };

  void start_cycle();
  void route_and_run();
  void report_all();
  void deliver();
  void end_cycle();
  void step(int n);

  Network& net_;
  ledger::Address purchaser_;
  market::SlaProposal proposal_;
  std::optional<RrSchedule> schedule_;
  std::optional<crypto::PublicKey> encrypt_to_;
  Stage stage_ = Stage::kIdle;
  ledger::BlockHeight next_start_;
  std::vector<RrCycle> cycles_;
  std::vector<node::Node*> workers_;
  std::vector<node::Assignment> assignments_;
  std::vector<node::PipelineResult> results_;
};

/// Drives one RequestResponse to completion, advancing blocks as it goes.
std::vector<RrCycle> request_response_run(Network& net, const ledger::Address& purchaser,
                                          const market::SlaProposal& proposal,
                                          std::optional<RrSchedule> schedule = std::nullopt,
                                          std::optional<crypto::PublicKey> encrypt_to = std::nullopt);

}  // namespace oraclesim::patterns
