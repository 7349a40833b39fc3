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

#include <istream>
#include <map>
#include <set>

#include "oraclesim/error.hpp"
#include "oraclesim/market.hpp"
#include "oraclesim/scenario.hpp"
#include "scenario_internal.hpp"

namespace oraclesim::scenario {

using nlohmann::json;

std::vector<ledger::LedgerEvent> read_log(std::istream& in) {
  std::vector<ledger::LedgerEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      events.push_back(ledger::parse_event(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedLog, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (events.empty() || events.back().topic != "run_end") {
    throw Error(ErrorCode::kMalformedLog, "log truncated after line " + std::to_string(line_no) + ": no run_end marker");
  }
  json end = json::parse(events.back().payload_text(), nullptr, false);
  if (end.is_discarded() || !end.contains("events") || end["events"] != events.size() - 1) {
    throw Error(ErrorCode::kMalformedLog, "line " + std::to_string(line_no) + ": run_end does not match the " +
                                              std::to_string(events.size() - 1) + " events before it");
  }
  return events;
}

namespace {

struct SlaInfo {
  std::string name;
  reporting::AnswerKind kind = reporting::AnswerKind::kNumeric;
  std::uint32_t decimals = 0;
  std::optional<std::string> truth;
};

json payload_of(const ledger::LedgerEvent& e) {
  json j = json::parse(e.payload_text(), nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::kMalformedLog, "event " + std::to_string(e.height.value) + "/" + std::to_string(e.seq) +
                                              " (" + e.topic + "): payload is not JSON");
  }
  return j;
}

}  // namespace

std::vector<std::string> replay(const std::vector<ledger::LedgerEvent>& events) {
  if (events.empty() || events.back().topic != "run_end") throw Error(ErrorCode::kMalformedLog, "no run_end marker");

  detail::Summary summary;
  std::map<std::uint64_t, SlaInfo> sla_info;                                   // script index
  std::map<std::pair<std::uint64_t, std::uint64_t>, detail::SlaMetric> cycles;  // (index, cycle)
  std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> cycle_of;   // sla id -> key
  std::map<std::uint64_t, std::uint64_t> started;                              // sla id -> height
  std::set<std::uint64_t> failed;
  std::map<std::uint64_t, detail::OracleMetric> oracles;                       // node index
  std::map<std::string, std::uint64_t> node_of;                                // address -> index
  std::map<std::string, std::uint64_t> initial;
  std::map<std::string, std::int64_t> holdings;
  std::map<std::uint64_t, std::string> escrow_owner;
  std::map<std::uint64_t, detail::InquiryMetric> inquiries;  // script index
  std::map<std::uint64_t, std::uint64_t> inquiry_index;      // inquiry id -> script index

  auto cycle_for = [&](std::uint64_t sla) -> detail::SlaMetric* {
    auto it = cycle_of.find(sla);
    return it == cycle_of.end() ? nullptr : &cycles[it->second];
  };
  auto inquiry_for = [&](const json& p) -> detail::InquiryMetric* {
    auto it = inquiry_index.find(p.at("inquiry").get<std::uint64_t>());
    return it == inquiry_index.end() ? nullptr : &inquiries[it->second];
  };

  try {
    for (const auto& e : events) {
      const std::string& t = e.topic;
      if (t.starts_with("rr_step_")) {
        if (t == "rr_step_1") started[std::stoull(e.payload_text())] = e.height.value;
        if (t == "rr_step_3_failed") {
          auto sla = payload_of(e).at("sla").get<std::uint64_t>();
          failed.insert(sla);
          if (auto* m = cycle_for(sla)) m->status = "aborted";
        }
        continue;
      }
      if (t == "mint") {
        json p = payload_of(e);
        holdings[p.at("to").get<std::string>()] += p.at("amount").get<std::int64_t>();
      } else if (t == "transfer") {
        json p = payload_of(e);
        holdings[p.at("from").get<std::string>()] -= p.at("amount").get<std::int64_t>();
        holdings[p.at("to").get<std::string>()] += p.at("amount").get<std::int64_t>();
      } else if (t == "fee") {
        json p = payload_of(e);
        holdings[p.at("from").get<std::string>()] -= p.at("amount").get<std::int64_t>();
      } else if (t == "escrow") {
        json p = payload_of(e);
        escrow_owner[p.at("id").get<std::uint64_t>()] = p.at("owner").get<std::string>();
      } else if (t == "release") {
        json p = payload_of(e);
        auto amount = p.at("amount").get<std::int64_t>();
        holdings[escrow_owner.at(p.at("id").get<std::uint64_t>())] -= amount;
        holdings[p.at("to").get<std::string>()] += amount;
      } else if (t == "scenario_start") {
        json p = payload_of(e);
        summary.scenario = p.at("name").get<std::string>();
        summary.seed = p.at("seed").get<std::uint64_t>();
        summary.blocks = p.at("blocks").get<std::uint64_t>();
      } else if (t == "scenario_node") {
        json p = payload_of(e);
        detail::OracleMetric m;
        m.node = p.at("index").get<std::uint64_t>();
        m.address = p.at("address").get<std::string>();
        m.behavior = p.at("behavior").get<std::string>();
        node_of[m.address] = m.node;
        initial[m.address] = p.at("balance").get<std::uint64_t>();
        oracles[m.node] = std::move(m);
      } else if (t == "scenario_sla") {
        json p = payload_of(e);
        SlaInfo info;
        info.name = p.at("name").get<std::string>();
        info.kind = reporting::answer_kind_from_string(p.at("answer_kind").get<std::string>());
        info.decimals = p.at("decimals").get<std::uint32_t>();
        if (!p.at("truth").is_null()) info.truth = p.at("truth").get<std::string>();
        sla_info[p.at("index").get<std::uint64_t>()] = std::move(info);
      } else if (t == "scenario_cycle") {
        json p = payload_of(e);
        auto key = std::make_pair(p.at("index").get<std::uint64_t>(), p.at("cycle").get<std::uint64_t>());
        const SlaInfo& info = sla_info.at(key.first);
        detail::SlaMetric m;
        m.name = info.name;
        m.cycle = key.second;
        m.sla = p.at("sla").get<std::uint64_t>();
        m.status = "pending";
        m.truth = info.truth;
        cycle_of[m.sla] = key;
        // A cycle that fails its payment check aborts before this marker.
        if (failed.contains(m.sla)) m.status = "aborted";
        cycles[key] = std::move(m);
      } else if (t == "aggregated") {
        json p = payload_of(e);
        auto sla = p.at("sla").get<std::uint64_t>();
        if (auto* m = cycle_for(sla)) {
          const SlaInfo& info = sla_info.at(cycle_of[sla].first);
          m->status = "delivered";
          m->decided = p.at("decided").get<bool>();
          if (m->decided) m->answer = detail::answer_json(reporting::answer_from_json(p.at("answer")), info.decimals);
          m->blocks_to_answer = e.height.value - started.at(sla);
        }
      } else if (t == "sla_finalized") {
        json p = payload_of(e);
        for (const auto& s : p.at("selected")) {
          auto it = node_of.find(s.get<std::string>());
          if (it != node_of.end()) oracles[it->second].assigned++;
        }
      } else if (t == "validity_recorded") {
        json p = payload_of(e);
        auto it = node_of.find(p.at("oracle").get<std::string>());
        if (it == node_of.end()) continue;
        auto& m = oracles[it->second];
        market::ReputationRecord rec;
        rec.assigned = p.at("assigned").get<std::uint64_t>();
        rec.valid = p.at("valid_count").get<std::uint64_t>();
        if (p.at("valid").get<bool>()) m.valid++;
        m.reputation_ppm.push_back(rec.score_ppm());
      } else if (t == "scenario_inquiry") {
        json p = payload_of(e);
        detail::InquiryMetric m;
        m.index = p.at("index").get<std::uint64_t>();
        m.inquiry = p.at("inquiry").get<std::uint64_t>();
        m.status = "open";
        if (!p.at("truth").is_null()) m.truth = p.at("truth").get<std::int64_t>();
        inquiry_index[m.inquiry] = m.index;
        inquiries[m.index] = m;
      } else if (t == "inquiry_resolved") {
        json p = payload_of(e);
        if (auto* m = inquiry_for(p)) {
          m->status = "resolved";
          m->resolved = p.at("answer").get<std::int64_t>();
        }
      } else if (t == "challenge_opened") {
        json p = payload_of(e);
        if (auto* m = inquiry_for(p)) {
          m->status = "challenged";
          m->challenged = true;
        }
      } else if (t == "challenge_resolved" || t == "inquiry_final") {
        json p = payload_of(e);
        if (auto* m = inquiry_for(p)) {
          m->status = "final";
          m->final_answer = p.at("answer").get<std::int64_t>();
          if (t == "challenge_resolved") m->flipped = p.at("flipped").get<bool>();
        }
      } else if (t == "run_end") {
        summary.events = payload_of(e).at("events").get<std::uint64_t>();
      }
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kMalformedLog, std::string("unexpected event payload: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw Error(ErrorCode::kMalformedLog, std::string("bad lifecycle payload: ") + ex.what());
  } catch (const std::out_of_range& ex) {
    throw Error(ErrorCode::kMalformedLog, std::string("event refers to unknown state: ") + ex.what());
  }

  std::vector<detail::SlaMetric> sla_list;
  for (auto& [key, m] : cycles) {
    const SlaInfo& info = sla_info.at(key.first);
    if (info.truth) m.correct = m.decided && m.answer == detail::truth_json(*info.truth, info.kind, info.decimals);
    sla_list.push_back(std::move(m));
  }
  std::vector<detail::OracleMetric> oracle_list;
  for (auto& [index, m] : oracles) {
    m.tokens_net = holdings[m.address] - static_cast<std::int64_t>(initial[m.address]);
    oracle_list.push_back(std::move(m));
  }
  std::vector<detail::InquiryMetric> inquiry_list;
  for (auto& [index, m] : inquiries) {
    if (m.truth) {
      auto answer = m.final_answer ? m.final_answer : m.resolved;
      m.correct = answer && *answer == *m.truth;
    }
    inquiry_list.push_back(std::move(m));
  }
  return detail::serialize(sla_list, oracle_list, inquiry_list, summary);
}

}  // namespace oraclesim::scenario
