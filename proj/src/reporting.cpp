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

#include "oraclesim/reporting.hpp"

#include "oraclesim/crypto.hpp"
#include "oraclesim/error.hpp"

namespace oraclesim::reporting {

using nlohmann::json;

Digest commitment_digest(SlaId sla, const Address& oracle, const AnswerValue& value, const Digest& salt) {
  return crypto::Sha256()
      .update("ORACLE-COMMIT-V1")
      .update_be64(sla)
      .update(oracle.id)
      .update(canon(value))
      .update(salt)
      .finish();
}

Reporting::Reporting(ledger::Ledger& ledger, market::Market& market)
    : ledger_(ledger), market_(market), address_(ledger.register_contract("aggregating")) {}

Phase Reporting::phase(SlaId sla) const {
  const auto& s = market_.sla(sla);
  if (s.status != market::SlaStatus::kActive) return Phase::kInactive;
  auto h = ledger_.height();
  if (h < s.commit_closes()) return Phase::kCommit;
  if (h < s.reveal_closes()) return Phase::kReveal;
  return Phase::kClosed;
}

void Reporting::commit(SlaId sla, const Address& oracle, const Digest& digest) {
  const auto& s = market_.sla(sla);
  if (!s.is_selected(oracle)) throw Error(ErrorCode::kNotSelected, oracle.hex());
  if (phase(sla) != Phase::kCommit) throw Error(ErrorCode::kPhaseClosed, "commit phase closed for SLA " + std::to_string(sla));
  Round& round = rounds_[sla];
  if (round.commitments.contains(oracle)) throw Error(ErrorCode::kDuplicate, "commitment already stored for " + oracle.hex());
  round.commitments.emplace(oracle, Commitment{digest, oracle, sla, ledger_.height()});
  ledger_.emit(address_, "committed", json{{"sla", sla}, {"oracle", oracle.hex()}, {"digest", to_hex(digest)}}.dump());
}

RevealOutcome Reporting::reveal(SlaId sla, const Address& oracle, const AnswerValue& value, const Digest& salt) {
  if (phase(sla) != Phase::kReveal) throw Error(ErrorCode::kPhaseClosed, "reveal phase not open for SLA " + std::to_string(sla));
  Round& round = rounds_[sla];
  auto it = round.commitments.find(oracle);
  if (it == round.commitments.end()) throw Error(ErrorCode::kNoCommitment, oracle.hex());
  if (round.accepted.contains(oracle) || round.mismatched.contains(oracle)) {
    throw Error(ErrorCode::kDuplicate, "already revealed for SLA " + std::to_string(sla));
  }
  bool ok = commitment_digest(sla, oracle, value, salt) == it->second.digest;
  if (ok) {
    round.accepted.emplace(oracle, value);
  } else {
    round.mismatched.insert(oracle);
  }
  ledger_.emit(address_, "revealed",
               json{{"sla", sla}, {"oracle", oracle.hex()}, {"accepted", ok}, {"value", answer_to_json(value)}}.dump());
  return ok ? RevealOutcome::kAccepted : RevealOutcome::kDigestMismatch;
}

const AggregationResult& Reporting::finalize_aggregation(SlaId sla) {
  const auto& s = market_.sla(sla);
  Round& round = rounds_[sla];
  if (round.result || s.status == market::SlaStatus::kAggregated || s.status == market::SlaStatus::kSettled) {
    throw Error(ErrorCode::kAlreadyFinalized, "SLA " + std::to_string(sla));
  }
  if (s.status != market::SlaStatus::kActive) {
    throw Error(ErrorCode::kWrongStatus, "SLA " + std::to_string(sla) + " is " + std::string(market::to_string(s.status)));
  }
  if (ledger_.height() < s.reveal_closes()) {
    throw Error(ErrorCode::kWindowOpen, "reveal phase closes at " + std::to_string(s.reveal_closes().value));
  }

  const auto& proposal = s.proposal;
  AggregationResult result;
  std::set<Address> well_typed;
  if (proposal.aggregator.is_boolean()) {
    std::vector<BooleanReveal> votes;
    for (const auto& [oracle, value] : round.accepted) {
      if (const bool* b = std::get_if<bool>(&value)) {
        votes.emplace_back(oracle, *b);
        well_typed.insert(oracle);
      }
    }
    result = aggregate_boolean(votes, proposal.aggregator.threshold, static_cast<std::uint32_t>(s.selected.size()));
  } else {
    std::vector<NumericReveal> values;
    std::map<Address, std::uint64_t> weights;
    for (const auto& [oracle, value] : round.accepted) {
      if (const Numeric* n = std::get_if<Numeric>(&value)) {
        values.emplace_back(oracle, n->raw);
        weights[oracle] = market_.reputation().record(oracle).score_ppm();
        well_typed.insert(oracle);
      }
    }
    result = aggregate_numeric(values, proposal.aggregator, weights);
  }
  round.result = result;

  json validity = json::object();
  for (const auto& oracle : s.selected) {
    auto v = result.per_oracle_validity.find(oracle);
    validity[oracle.hex()] = well_typed.contains(oracle) && v != result.per_oracle_validity.end() && v->second;
  }
  ledger_.emit(address_, "aggregated",
               json{{"sla", sla},
                    {"decided", result.decided()},
                    {"answer", answer_to_json(result.answer)},
                    {"method", result.method.to_string()},
                    {"validity", validity}}
                   .dump());

  market_.mark_aggregated(sla);
  std::vector<Address> selected = s.selected;
  for (const auto& oracle : selected) {
    market_.record_validity(sla, oracle, validity[oracle.hex()].get<bool>(), round.accepted.contains(oracle));
  }
  return *round.result;
}

const AggregationResult* Reporting::delivered(SlaId sla) const {
  auto it = rounds_.find(sla);
  if (it == rounds_.end() || !it->second.result) return nullptr;
  return &*it->second.result;
}

const Commitment* Reporting::commitment(SlaId sla, const Address& oracle) const {
  auto it = rounds_.find(sla);
  if (it == rounds_.end()) return nullptr;
  auto c = it->second.commitments.find(oracle);
  return c == it->second.commitments.end() ? nullptr : &c->second;
}

std::optional<AnswerValue> Reporting::revealed_value(SlaId sla, const Address& oracle) const {
  auto it = rounds_.find(sla);
  if (it == rounds_.end()) return std::nullopt;
  auto v = it->second.accepted.find(oracle);
  if (v == it->second.accepted.end()) return std::nullopt;
  return v->second;
}

}  // namespace oraclesim::reporting
