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

#include <memory>

#include "oraclesim/error.hpp"
#include "oraclesim/network.hpp"
#include "oraclesim/request_response.hpp"
#include "oraclesim/scenario.hpp"
#include "scenario_internal.hpp"

namespace oraclesim::scenario {

using nlohmann::json;

namespace {

struct SlaState {
  ledger::Address purchaser;
  std::unique_ptr<patterns::RequestResponse> run;
  std::size_t delivered = 0;
};

struct InquiryState {
  std::optional<consensus::InquiryId> id;
  bool challenge_attempted = false;
};

struct NodeTrack {
  ledger::TokenAmount initial;
  std::uint64_t results = 0;
  std::vector<std::uint64_t> trajectory;
};

class Driver {
 public:
  Driver(const ScenarioConfig& config, std::uint64_t seed)
      : config_(config),
        seed_(seed),
        net_(seed, std::make_shared<const query::FixtureRegistry>(
                       config.fixtures.empty() ? query::FixtureRegistry{}
                                               : query::FixtureRegistry::load_manifest(config.fixtures))),
        consensus_(net_.ledger, config.consensus),
        annotator_(net_.ledger.register_contract("scenario")) {
    net_.parallel_pipelines = config.parallel;
    if (config.fee.units() > 0) net_.ledger.set_flat_fee(config.fee);
  }

  RunOutput run();

 private:
  void note(std::string_view topic, const json& payload) { net_.ledger.emit(annotator_, topic, payload.dump()); }
  void setup();
  void step_slas();
  void step_inquiries();
  void step_inquiry(std::size_t index);
  void sample_reputation();
  void check_invariants();
  std::vector<std::string> live_metrics(std::uint64_t events) const;

  const ScenarioConfig& config_;
  std::uint64_t seed_;
  Network net_;
  consensus::Consensus consensus_;
  ledger::Address annotator_;
  std::vector<SlaState> slas_;
  std::vector<InquiryState> inquiries_;
  std::vector<NodeTrack> tracks_;
  RunOutput out_;
};

void Driver::setup() {
  note("scenario_start", json{{"name", config_.name}, {"seed", seed_}, {"blocks", config_.blocks}});
  for (const auto& group : config_.nodes) {
    for (std::size_t k = 0; k < group.count; ++k) {
      node::Node& n = net_.add_node(group.balance, group.behavior);
      tracks_.push_back(NodeTrack{group.balance, 0, {}});
      note("scenario_node", json{{"index", n.index()}, {"address", n.address().hex()},
                                 {"behavior", n.behavior().to_string()}, {"balance", group.balance.units()}});
    }
  }
  for (std::size_t i = 0; i < config_.slas.size(); ++i) {
    const auto& s = config_.slas[i];
    SlaState state;
    state.purchaser = net_.ledger.create_account(s.purchaser_balance);
    note("scenario_sla", json{{"index", i}, {"name", s.name}, {"purchaser", state.purchaser.hex()},
                              {"answer_kind", reporting::to_string(s.proposal.answer_kind)},
                              {"decimals", s.proposal.decimals}, {"truth", detail::opt(s.truth)}});
    slas_.push_back(std::move(state));
  }
  inquiries_.resize(config_.inquiries.size());
}

void Driver::sample_reputation() {
  const auto& nodes = net_.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto rec = net_.reputation.record(nodes[i]->address());
    if (rec.valid + rec.penalized != tracks_[i].results) {
      tracks_[i].results = rec.valid + rec.penalized;
      tracks_[i].trajectory.push_back(rec.score_ppm());
    }
  }
}

void Driver::step_slas() {
  const ledger::BlockHeight h = net_.ledger.height();
  for (std::size_t i = 0; i < config_.slas.size(); ++i) {
    const auto& script = config_.slas[i];
    SlaState& state = slas_[i];
    if (!state.run) {
      if (h.value != script.start) continue;
      std::optional<patterns::RrSchedule> schedule;
      if (script.repeat_interval > 0) {
        schedule = patterns::RrSchedule{script.repeat_interval,
                                        ledger::BlockHeight{script.repeat_until.value_or(config_.blocks)}};
      }
      std::optional<crypto::PublicKey> key;
      if (script.encrypt) key = crypto::BoxKey(crypto::derive_seed("ORACLE-PURCHASER-BOX-V1", seed_ ^ i)).public_key();
      state.run = std::make_unique<patterns::RequestResponse>(net_, state.purchaser, script.proposal, schedule, key);
    }
    const std::size_t before = state.run->cycles().size();
    state.run->tick();
    const auto& cycles = state.run->cycles();
    if (cycles.size() > before) {
      note("scenario_cycle", json{{"index", i}, {"name", script.name}, {"cycle", cycles.size() - 1},
                                  {"sla", cycles.back().sla}});
    }
    std::size_t delivered = 0;
    for (const auto& c : cycles) delivered += c.result ? 1 : 0;
    if (delivered > state.delivered) {
      state.delivered = delivered;
      if (script.proposal.query.proof == query::ProofType::kSignature) {
        const auto& cycle = cycles.back();
        try {
          auto r = net_.engine().execute(script.proposal.query, h, "sla-" + std::to_string(cycle.sla));
          if (r.proof) out_.proofs.push_back({"sla-" + std::to_string(cycle.sla), r.proof->to_json(), r.value});
        } catch (const Error&) {
          // The data source failed for the attester too; nothing to prove.
        }
      }
    }
    sample_reputation();
  }
}

void Driver::step_inquiry(std::size_t index) {
  const auto& script = config_.inquiries[index];
  InquiryState& state = inquiries_[index];
  const ledger::BlockHeight h = net_.ledger.height();
  auto rejected = [&](std::string_view what, const Error& e) {
    note("scenario_rejected", json{{"inquiry", index}, {"action", what}, {"reason", to_string(e.code())}});
  };

  if (!state.id) {
    if (h.value != script.open_at) return;
    state.id = consensus_.open_inquiry(script.question, script.domain, script.quorum, script.deposit);
    note("scenario_inquiry", json{{"index", index}, {"inquiry", *state.id}, {"truth", detail::opt(script.truth)}});
    for (const auto& group : script.reporters) {
      for (std::size_t k = 0; k < group.count; ++k) {
        ledger::Address reporter = net_.ledger.create_account(group.stake);
        try {
          consensus_.submit_report(*state.id, reporter, group.answer);
        } catch (const Error& e) {
          rejected("report", e);
        }
      }
    }
    return;
  }

  const consensus::InquiryRound& round = consensus_.inquiry(*state.id);
  if (round.status == consensus::InquiryStatus::kResolved && script.challenge && !state.challenge_attempted &&
      h >= round.resolved_at + script.challenge->delay) {
    state.challenge_attempted = true;
    const auto& ch = *script.challenge;
    ledger::Address challenger = net_.ledger.create_account(ch.challenger_balance);
    try {
      consensus_.open_challenge(*state.id, challenger, ch.claimed);
      const ledger::TokenAmount fee = net_.ledger.flat_fee();
      for (auto amount : ch.support) {
        consensus_.stake_side(*state.id, net_.ledger.create_account(amount + fee), consensus::Side::kSupportOriginal,
                              amount);
      }
      for (auto amount : ch.dispute) {
        consensus_.stake_side(*state.id, net_.ledger.create_account(amount + fee), consensus::Side::kSupportChallenge,
                              amount);
      }
    } catch (const Error& e) {
      rejected("challenge", e);
    }
  }
  if (round.status == consensus::InquiryStatus::kChallenged && h >= round.challenge->deadline) {
    consensus_.resolve_challenge(*state.id);
  } else if (round.status == consensus::InquiryStatus::kResolved &&
             (!script.challenge || state.challenge_attempted) &&
             h >= round.resolved_at + config_.consensus.challenge_window) {
    consensus_.finalize(*state.id);
  }
}

void Driver::step_inquiries() {
  for (std::size_t i = 0; i < config_.inquiries.size(); ++i) step_inquiry(i);
}

void Driver::check_invariants() {
  if (!net_.ledger.conserved()) {
    out_.violations.push_back("height " + std::to_string(net_.ledger.height().value) +
                              ": balances plus open escrows differ from minted supply");
  }
  for (market::SlaId id = 0; id < net_.market.size(); ++id) {
    const auto& sla = net_.market.sla(id);
    if (sla.status == market::SlaStatus::kSettled && sla.validity.size() != sla.selected.size()) {
      out_.violations.push_back("SLA " + std::to_string(id) + " settled without a validity record per oracle");
    }
  }
}

std::vector<std::string> Driver::live_metrics(std::uint64_t events) const {
  std::vector<detail::SlaMetric> slas;
  for (std::size_t i = 0; i < config_.slas.size(); ++i) {
    if (!slas_[i].run) continue;
    const auto& script = config_.slas[i];
    const auto& cycles = slas_[i].run->cycles();
    for (std::size_t k = 0; k < cycles.size(); ++k) {
      const auto& c = cycles[k];
      detail::SlaMetric m;
      m.name = script.name;
      m.cycle = k;
      m.sla = c.sla;
      m.truth = script.truth;
      m.status = c.aborted ? "aborted" : c.result ? "delivered" : "pending";
      if (c.result) {
        m.decided = c.result->decided();
        if (m.decided) m.answer = detail::answer_json(c.result->answer, script.proposal.decimals);
        m.blocks_to_answer = c.delivered_at.value - c.started.value;
      }
      if (script.truth) {
        m.correct = m.decided &&
                    m.answer == detail::truth_json(*script.truth, script.proposal.answer_kind, script.proposal.decimals);
      }
      slas.push_back(std::move(m));
    }
  }

  std::vector<detail::OracleMetric> oracles;
  const auto& nodes = net_.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = *nodes[i];
    auto rec = net_.reputation.record(n.address());
    detail::OracleMetric m;
    m.node = n.index();
    m.address = n.address().hex();
    m.behavior = n.behavior().to_string();
    m.assigned = rec.assigned;
    m.valid = rec.valid;
    m.reputation_ppm = tracks_[i].trajectory;
    const auto held = net_.ledger.balance(n.address()) + net_.ledger.escrowed_by(n.address());
    m.tokens_net = static_cast<std::int64_t>(held.units()) - static_cast<std::int64_t>(tracks_[i].initial.units());
    oracles.push_back(std::move(m));
  }

  std::vector<detail::InquiryMetric> inquiries;
  for (std::size_t i = 0; i < config_.inquiries.size(); ++i) {
    if (!inquiries_[i].id) continue;
    const auto& round = consensus_.inquiry(*inquiries_[i].id);
    detail::InquiryMetric m;
    m.index = i;
    m.inquiry = round.id;
    m.status = std::string(consensus::to_string(round.status));
    m.resolved = round.resolved;
    m.final_answer = round.status == consensus::InquiryStatus::kFinal ? round.final_answer : std::nullopt;
    m.truth = config_.inquiries[i].truth;
    m.challenged = round.challenge.has_value();
    m.flipped = round.flipped;
    if (m.truth) {
      auto answer = m.final_answer ? m.final_answer : m.resolved;
      m.correct = answer && *answer == *m.truth;
    }
    inquiries.push_back(std::move(m));
  }

  detail::Summary summary{config_.name, seed_, config_.blocks, events};
  return detail::serialize(slas, oracles, inquiries, summary);
}

RunOutput Driver::run() {
  setup();
  for (std::uint64_t b = 0; b < config_.blocks; ++b) {
    step_slas();
    step_inquiries();
    check_invariants();
    net_.ledger.advance_block();
  }
  const std::uint64_t events = net_.ledger.events().size();
  note("run_end", json{{"events", events}});
  out_.events = net_.ledger.events();
  out_.metrics = live_metrics(events);
  out_.replay_metrics = replay(out_.events);
  out_.engine_key = net_.engine().public_key();
  return std::move(out_);
}

}  // namespace

RunOutput run_scenario(const ScenarioConfig& config, std::optional<std::uint64_t> seed_override) {
  Driver driver(config, seed_override.value_or(config.seed));
  return driver.run();
}

}  // namespace oraclesim::scenario
