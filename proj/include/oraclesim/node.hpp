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

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "oraclesim/aggregate.hpp"
#include "oraclesim/market.hpp"
#include "oraclesim/query.hpp"
#include "oraclesim/reporting.hpp"
#include "oraclesim/schema.hpp"

// Off-chain oracle node: watches the event log for SLAs that selected it,
// turns each query into a pipeline of subtasks, and reports the result
// through commit-reveal.
namespace oraclesim::node {

using ledger::Address;
using market::SlaId;

using NodeId = std::uint32_t;
using Params = std::map<std::string, std::string>;

/// Built-in kinds: http_get, http_post, source, parse_json, parse_xml,
/// xpath, slice, to_chain_format. `adapter:<name>` dispatches to a
/// registered adapter.
struct Subtask {
  std::string kind;
  Params params;
  Schema input_schema;
  Schema output_schema;
};

/// Builds a built-in subtask with its declared schemas. Throws
/// Error(kUnknownSubtask) for unknown kinds and Error(kInvalidArgument) for
/// missing or malformed params.
Subtask make_subtask(const std::string& kind, Params params = {});

struct AdapterDescriptor {
  std::string name;
  Schema input_schema;
  Schema output_schema;
};

/// Document in, document out. Throwing signals an adapter failure.
using AdapterHandler = std::function<nlohmann::json(const nlohmann::json& input, const Params& params)>;

struct Assignment {
  std::string id;
  SlaId sla = 0;
  /// One pipeline per data source; all but the first come from query
  /// mirrors and are aggregated locally.
  std::vector<std::vector<Subtask>> pipelines;
  reporting::Aggregator aggregator;
  reporting::AnswerKind answer_kind = reporting::AnswerKind::kNumeric;
  std::uint32_t decimals = 0;
  std::optional<std::string> failure;  // set when the query could not be turned into pipelines

  const std::vector<Subtask>& subtasks() const { return pipelines.front(); }
  bool failed() const { return failure.has_value(); }
};

struct TraceEntry {
  std::string assignment_id;
  std::size_t step = 0;
  std::string kind;
  Digest input_digest{};
  Digest output_digest{};
  std::string status;  // "ok" or an error code name
};

/// `assignment-id step kind input-digest output-digest status`
std::string format_trace(const TraceEntry& entry);

struct PipelineResult {
  std::optional<reporting::AnswerValue> value;
  std::vector<TraceEntry> trace;
  std::optional<std::size_t> failed_step;
  std::string error;

  bool ok() const { return value.has_value(); }
};

enum class Behavior { kHonest, kLazy, kColluding, kRandom, kEquivocating };

struct BehaviorSpec {
  Behavior kind = Behavior::kHonest;
  std::string group;  // colluding only
  std::string value;  // colluding only: decimal text, "true" or "false"

  std::string to_string() const;
  /// "honest", "lazy", "random", "equivocating" or {"colluding": {"group": g,
  /// "value": v}}. Unknown names throw Error(kConfigError).
  static BehaviorSpec from_json(const nlohmann::json& j);
};

enum class ReportAction { kNone, kCommitted, kRevealed, kWithheld };

class Node {
 public:
  Node(NodeId index, Address address, std::uint64_t scenario_seed, std::shared_ptr<const query::QueryEngine> engine,
       BehaviorSpec behavior = {});

  NodeId index() const { return index_; }
  const Address& address() const { return address_; }
  const BehaviorSpec& behavior() const { return behavior_; }

  void register_adapter(AdapterDescriptor descriptor, AdapterHandler handler);
  bool has_adapter(const std::string& name) const { return adapters_.contains(name); }
  /// `adapter:<name>` subtask carrying the adapter's declared schemas.
  Subtask adapter_subtask(const std::string& name, Params params = {}) const;

  /// Assignments for every `sla_finalized` event at or after `from` that
  /// selected this node. Pure function of the log and market state.
  std::vector<Assignment> watch_and_build(const ledger::Ledger& ledger, const market::Market& market,
                                          ledger::BlockHeight from) const;
  Assignment build_assignment(SlaId sla, const market::SlaProposal& proposal) const;
  /// Throws Error(kInvalidArgument) for empty pipelines,
  /// Error(kUnknownSubtask) for unresolvable kinds and
  /// Error(kSchemaViolation) for incompatible neighbouring schemas.
  void check_assignment(const Assignment& assignment) const;

  /// Subtasks run strictly in order; each input and output is validated
  /// against its schema. Safe to call concurrently.
  PipelineResult run_assignment(const Assignment& assignment) const;

  /// Commits during the commit phase and reveals during the reveal phase,
  /// as the node's behavior dictates. Salts come from the node's seeded
  /// generator and are kept until the reveal.
  ReportAction report(reporting::Reporting& reporting, const Assignment& assignment, const PipelineResult& result);

 private:
  struct Pending {
    reporting::AnswerValue committed;
    reporting::AnswerValue revealed;
    Digest salt{};
    bool revealed_done = false;
  };

  nlohmann::json run_subtask(const Subtask& subtask, const nlohmann::json& input) const;
  std::optional<reporting::AnswerValue> choose_answer(const Assignment& assignment, const PipelineResult& result);
  Digest draw_salt();

  NodeId index_;
  Address address_;
  std::shared_ptr<const query::QueryEngine> engine_;
  BehaviorSpec behavior_;
  std::mt19937_64 rng_;
  std::map<std::string, std::pair<AdapterDescriptor, AdapterHandler>> adapters_;
  std::map<SlaId, Pending> pending_;
};

}  // namespace oraclesim::node
