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

#include "oraclesim/request_response.hpp"

#include <json.hpp>

#include "oraclesim/error.hpp"
#include "oraclesim/kernels.hpp"

namespace oraclesim::patterns {

using nlohmann::json;

RequestResponse::RequestResponse(Network& net, ledger::Address purchaser, market::SlaProposal proposal,
                                 std::optional<RrSchedule> schedule, std::optional<crypto::PublicKey> encrypt_to)
    : net_(net),
      purchaser_(purchaser),
      proposal_(std::move(proposal)),
      schedule_(schedule),
      encrypt_to_(encrypt_to),
      next_start_(net.ledger.height()) {
  if (schedule_ && schedule_->interval == 0) throw Error(ErrorCode::kInvalidArgument, "schedule interval must be positive");
}

std::optional<market::SlaId> RequestResponse::active_sla() const {
  if (stage_ == Stage::kIdle || stage_ == Stage::kDone || cycles_.empty()) return std::nullopt;
  return cycles_.back().sla;
}

void RequestResponse::step(int n) {
  net_.ledger.emit(net_.market.address(), "rr_step_" + std::to_string(n), std::to_string(cycles_.back().sla));
}

void RequestResponse::start_cycle() {
  RrCycle cycle;
  cycle.started = net_.ledger.height();
  cycle.sla = net_.market.request_sla(purchaser_, proposal_);
  cycles_.push_back(std::move(cycle));
  step(1);
  step(2);
  try {
    net_.market.fund_sla(cycles_.back().sla);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientFunds && e.code() != ErrorCode::kUnknownAddress) throw;
    net_.market.void_request(cycles_.back().sla, "payment check failed");
    cycles_.back().aborted = true;
    cycles_.back().abort_reason = e.what();
    net_.ledger.emit(net_.market.address(), "rr_step_3_failed",
                     json{{"sla", cycles_.back().sla}, {"reason", "payment"}}.dump());
    end_cycle();
    return;
  }
  net_.collect_bids(cycles_.back().sla);
  stage_ = Stage::kBidding;
}

void RequestResponse::route_and_run() {
  const market::SlaId id = cycles_.back().sla;
  const auto& sla = net_.market.finalize_sla(id);
  if (sla.status == market::SlaStatus::kVoided) {
    cycles_.back().aborted = true;
    cycles_.back().abort_reason = "not enough qualified bids";
    net_.ledger.emit(net_.market.address(), "rr_step_3_failed", json{{"sla", id}, {"reason", "bids"}}.dump());
    end_cycle();
    return;
  }
  workers_.clear();
  assignments_.clear();
  for (const auto& oracle : sla.selected) {
    node::Node* n = net_.find_node(oracle);
    if (!n) continue;  // selected by hand, not one of ours
    workers_.push_back(n);
    assignments_.push_back(n->build_assignment(id, sla.proposal));
  }
  step(3);
  step(4);
  std::vector<const node::Node*> nodes(workers_.begin(), workers_.end());
  results_ = net_.parallel_pipelines ? kernels::run_assignments_parallel(nodes, assignments_)
                                     : kernels::run_assignments_serial(nodes, assignments_);
  step(5);
  report_all();
  stage_ = Stage::kCommit;
}

void RequestResponse::report_all() {
  for (std::size_t i = 0; i < workers_.size(); ++i) workers_[i]->report(net_.reporting, assignments_[i], results_[i]);
}

void RequestResponse::deliver() {
  RrCycle& cycle = cycles_.back();
  cycle.result = net_.reporting.finalize_aggregation(cycle.sla);
  cycle.delivered_at = net_.ledger.height();
  if (encrypt_to_) {
    json body{{"sla", cycle.sla}, {"decided", cycle.result->status == reporting::AggregationResult::Status::kDecided}};
    if (cycle.result->status == reporting::AggregationResult::Status::kDecided) {
      body["answer"] = reporting::answer_to_json(cycle.result->answer);
    }
    cycle.sealed_result = crypto::seal(*encrypt_to_, to_bytes(body.dump()));
  }
  step(7);
  if (encrypt_to_) {
    net_.ledger.emit(net_.market.address(), "rr_delivery", json{{"sla", cycle.sla}, {"encrypted", true}}.dump());
  }
  end_cycle();
}

void RequestResponse::end_cycle() {
  workers_.clear();
  assignments_.clear();
  results_.clear();
  if (schedule_) {
    next_start_ = cycles_.back().started + schedule_->interval;
    stage_ = next_start_ < schedule_->until ? Stage::kIdle : Stage::kDone;
  } else {
    stage_ = Stage::kDone;
  }
}

void RequestResponse::tick() {
  const ledger::BlockHeight h = net_.ledger.height();
  switch (stage_) {
    case Stage::kIdle:
      if (h >= next_start_) start_cycle();
      break;
    case Stage::kBidding:
      if (h >= net_.market.sla(cycles_.back().sla).bidding_closes()) route_and_run();
      break;
    case Stage::kCommit:
      if (net_.reporting.phase(cycles_.back().sla) == reporting::Phase::kReveal) {
        report_all();
        step(6);
        stage_ = Stage::kReveal;
      }
      break;
    case Stage::kReveal:
      if (h >= net_.market.sla(cycles_.back().sla).reveal_closes()) deliver();
      break;
    case Stage::kDone:
      break;
  }
}

std::vector<RrCycle> request_response_run(Network& net, const ledger::Address& purchaser,
                                          const market::SlaProposal& proposal, std::optional<RrSchedule> schedule,
                                          std::optional<crypto::PublicKey> encrypt_to) {
  RequestResponse run(net, purchaser, proposal, schedule, encrypt_to);
  run.tick();
  while (!run.done()) {
    net.ledger.advance_block();
    run.tick();
  }
  return run.cycles();
}

}  // namespace oraclesim::patterns
