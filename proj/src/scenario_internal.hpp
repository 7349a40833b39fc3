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

// Shared record layout for live and replayed metrics. Both sides build the
// same structs from different inputs, then serialize them here.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oraclesim/aggregate.hpp"
#include "oraclesim/bytes.hpp"

namespace oraclesim::scenario::detail {

struct SlaMetric {
  std::string name;
  std::uint64_t cycle = 0;
  std::uint64_t sla = 0;
  std::string status;             // delivered, aborted, pending
  nlohmann::json answer;          // null unless decided
  bool decided = false;
  std::optional<std::string> truth;
  std::optional<bool> correct;
  std::optional<std::uint64_t> blocks_to_answer;
};

struct OracleMetric {
  std::uint64_t node = 0;
  std::string address;
  std::string behavior;
  std::uint64_t assigned = 0;
  std::uint64_t valid = 0;
  std::vector<std::uint64_t> reputation_ppm;  // after each validity record
  std::int64_t tokens_net = 0;
};

struct InquiryMetric {
  std::uint64_t index = 0;
  std::uint64_t inquiry = 0;
  std::string status;
  std::optional<std::int64_t> resolved;
  std::optional<std::int64_t> final_answer;
  std::optional<std::int64_t> truth;
  std::optional<bool> correct;
  bool challenged = false;
  bool flipped = false;
};

struct Summary {
  std::string scenario;
  std::uint64_t seed = 0;
  std::uint64_t blocks = 0;
  std::uint64_t events = 0;
  std::uint64_t sla_cycles = 0;
  std::uint64_t slas_scored = 0;
  std::uint64_t slas_correct = 0;
  std::uint64_t inquiries_scored = 0;
  std::uint64_t inquiries_correct = 0;
};

inline nlohmann::json answer_json(const reporting::AnswerValue& v, std::uint32_t decimals) {
  if (const bool* b = std::get_if<bool>(&v)) return *b;
  if (const auto* n = std::get_if<reporting::Numeric>(&v)) return reporting::format_fixed(*n, decimals);
  return to_hex(std::get<Bytes>(v));
}

inline nlohmann::json truth_json(const std::string& truth, reporting::AnswerKind kind, std::uint32_t decimals) {
  switch (kind) {
    case reporting::AnswerKind::kBoolean: return truth == "true";
    case reporting::AnswerKind::kNumeric: return answer_json(reporting::parse_fixed(truth, decimals), decimals);
    case reporting::AnswerKind::kBytes: return to_hex(to_bytes(truth));
  }
  return nullptr;
}

inline nlohmann::json opt(const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

inline std::vector<std::string> serialize(const std::vector<SlaMetric>& slas, const std::vector<OracleMetric>& oracles,
                                          const std::vector<InquiryMetric>& inquiries, Summary summary) {
  using nlohmann::json;
  std::vector<std::string> out;
  for (const auto& s : slas) {
    summary.sla_cycles++;
    if (s.correct) {
      summary.slas_scored++;
      if (*s.correct) summary.slas_correct++;
    }
    out.push_back(json{{"type", "sla"}, {"scenario", summary.scenario}, {"name", s.name}, {"cycle", s.cycle},
                       {"sla", s.sla}, {"status", s.status}, {"decided", s.decided}, {"answer", s.answer},
                       {"truth", opt(s.truth)}, {"correct", opt(s.correct)},
                       {"blocks_to_answer", opt(s.blocks_to_answer)}}
                      .dump());
  }
  for (const auto& o : oracles) {
    out.push_back(json{{"type", "oracle"}, {"scenario", summary.scenario}, {"node", o.node}, {"address", o.address},
                       {"behavior", o.behavior}, {"assigned", o.assigned}, {"valid", o.valid},
                       {"reputation_ppm", o.reputation_ppm}, {"tokens_net", o.tokens_net}}
                      .dump());
  }
  for (const auto& q : inquiries) {
    if (q.correct) {
      summary.inquiries_scored++;
      if (*q.correct) summary.inquiries_correct++;
    }
    out.push_back(json{{"type", "inquiry"}, {"scenario", summary.scenario}, {"index", q.index},
                       {"inquiry", q.inquiry}, {"status", q.status}, {"resolved", opt(q.resolved)},
                       {"final", opt(q.final_answer)}, {"truth", opt(q.truth)}, {"correct", opt(q.correct)},
                       {"challenged", q.challenged}, {"flipped", q.flipped}}
                      .dump());
  }
  out.push_back(json{{"type", "summary"}, {"scenario", summary.scenario}, {"seed", summary.seed},
                     {"blocks", summary.blocks}, {"events", summary.events}, {"sla_cycles", summary.sla_cycles},
                     {"slas_scored", summary.slas_scored}, {"slas_correct", summary.slas_correct},
                     {"inquiries_scored", summary.inquiries_scored}, {"inquiries_correct", summary.inquiries_correct}}
                    .dump());
  return out;
}

}  // namespace oraclesim::scenario::detail
