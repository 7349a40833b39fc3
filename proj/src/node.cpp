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

#include "oraclesim/node.hpp"

#include <charconv>

#include "oraclesim/crypto.hpp"
#include "oraclesim/error.hpp"
#include "oraclesim/helpers.hpp"

namespace oraclesim::node {

using nlohmann::json;
using reporting::AnswerKind;
using reporting::AnswerValue;
using reporting::Numeric;

namespace {

const std::string& require(const Params& params, const std::string& key, const std::string& kind) {
  auto it = params.find(key);
  if (it == params.end()) throw Error(ErrorCode::kInvalidArgument, kind + " needs param '" + key + "'");
  return it->second;
}

std::uint64_t require_u64(const Params& params, const std::string& key, const std::string& kind) {
  const std::string& text = require(params, key, kind);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument, kind + " param '" + key + "' must be an unsigned integer");
  }
  return value;
}

Digest value_digest(const json& value) { return crypto::sha256(value.dump()); }

const Schema& string_schema() {
  static const Schema s = Schema::of_type("string");
  return s;
}

AnswerValue to_answer(const json& input, AnswerKind kind, std::uint32_t decimals) {
  switch (kind) {
    case AnswerKind::kNumeric: {
      if (input.is_number()) return reporting::parse_fixed(input.dump(), decimals);
      if (input.is_string()) return reporting::parse_fixed(input.get<std::string>(), decimals);
      break;
    }
    case AnswerKind::kBoolean: {
      if (input.is_boolean()) return input.get<bool>();
      if (input.is_number_integer()) return input.get<std::int64_t>() != 0;
      if (input.is_string()) {
        const auto& s = input.get_ref<const std::string&>();
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
      }
      break;
    }
    case AnswerKind::kBytes:
      if (input.is_string()) return to_bytes(input.get<std::string>());
      break;
  }
  throw Error(ErrorCode::kParseFailure, "cannot convert " + input.dump() + " to " + std::string(reporting::to_string(kind)));
}

AnswerValue parse_configured(const std::string& text, AnswerKind kind, std::uint32_t decimals) {
  return to_answer(json(text), kind, decimals);
}

}  // namespace

Subtask make_subtask(const std::string& kind, Params params) {
  Subtask t{kind, std::move(params), {}, {}};
  if (kind == "http_get") {
    require(t.params, "url", kind);
    t.output_schema = string_schema();
  } else if (kind == "http_post") {
    require(t.params, "url", kind);
    require(t.params, "body", kind);
    t.output_schema = string_schema();
  } else if (kind == "source") {
    query::QuerySpec::from_json(json::parse(require(t.params, "query", kind), nullptr, false)).validate();
    t.output_schema = string_schema();
  } else if (kind == "parse_json") {
    require(t.params, "path", kind);
    t.input_schema = Schema(json{{"type", {"string", "object", "array"}}});
  } else if (kind == "parse_xml") {
    require(t.params, "path", kind);
    t.input_schema = string_schema();
    t.output_schema = string_schema();
  } else if (kind == "xpath") {
    require(t.params, "expr", kind);
    t.input_schema = string_schema();
    t.output_schema = string_schema();
  } else if (kind == "slice") {
    require_u64(t.params, "offset", kind);
    require_u64(t.params, "length", kind);
    t.input_schema = string_schema();
    t.output_schema = string_schema();
  } else if (kind == "to_chain_format") {
    reporting::answer_kind_from_string(require(t.params, "kind", kind));
    if (t.params.contains("decimals")) require_u64(t.params, "decimals", kind);
    t.input_schema = Schema(json{{"type", {"string", "number", "boolean"}}});
    t.output_schema = Schema(json{{"type", "object"},
                                  {"required", {"kind", "canon", "value"}},
                                  {"properties", {{"kind", {{"type", "string"}}}, {"canon", {{"type", "string"}}}}}});
  } else {
    throw Error(ErrorCode::kUnknownSubtask, kind);
  }
  return t;
}

std::string format_trace(const TraceEntry& entry) {
  return entry.assignment_id + " " + std::to_string(entry.step) + " " + entry.kind + " " + to_hex(entry.input_digest) +
         " " + to_hex(entry.output_digest) + " " + entry.status;
}

std::string BehaviorSpec::to_string() const {
  switch (kind) {
    case Behavior::kHonest: return "honest";
    case Behavior::kLazy: return "lazy";
    case Behavior::kRandom: return "random";
    case Behavior::kEquivocating: return "equivocating";
    case Behavior::kColluding: return "colluding(" + group + "," + value + ")";
  }
  return "unknown";
}

BehaviorSpec BehaviorSpec::from_json(const json& j) {
  if (j.is_string()) {
    const auto& name = j.get_ref<const std::string&>();
    if (name == "honest") return {Behavior::kHonest, {}, {}};
    if (name == "lazy") return {Behavior::kLazy, {}, {}};
    if (name == "random") return {Behavior::kRandom, {}, {}};
    if (name == "equivocating") return {Behavior::kEquivocating, {}, {}};
    throw Error(ErrorCode::kConfigError, "unknown behavior '" + name + "'");
  }
  if (j.is_object() && j.size() == 1 && j.contains("colluding")) {
    const json& c = j["colluding"];
    if (!c.is_object() || !c.contains("value")) throw Error(ErrorCode::kConfigError, "colluding needs a value");
    BehaviorSpec spec{Behavior::kColluding, {}, {}};
    spec.group = c.contains("group") ? c["group"].get<std::string>() : "default";
    spec.value = c["value"].is_string() ? c["value"].get<std::string>() : c["value"].dump();
    return spec;
  }
  throw Error(ErrorCode::kConfigError, "unknown behavior " + j.dump());
}

Node::Node(NodeId index, Address address, std::uint64_t scenario_seed, std::shared_ptr<const query::QueryEngine> engine,
           BehaviorSpec behavior)
    : index_(index),
      address_(address),
      engine_(std::move(engine)),
      behavior_(std::move(behavior)),
      rng_(scenario_seed ^ static_cast<std::uint64_t>(index)) {}

void Node::register_adapter(AdapterDescriptor descriptor, AdapterHandler handler) {
  if (descriptor.name.empty()) throw Error(ErrorCode::kInvalidArgument, "adapter name must not be empty");
  if (adapters_.contains(descriptor.name)) throw Error(ErrorCode::kDuplicate, "adapter '" + descriptor.name + "'");
  std::string name = descriptor.name;
  adapters_.emplace(std::move(name), std::make_pair(std::move(descriptor), std::move(handler)));
}

Subtask Node::adapter_subtask(const std::string& name, Params params) const {
  auto it = adapters_.find(name);
  if (it == adapters_.end()) throw Error(ErrorCode::kUnknownSubtask, "adapter:" + name);
  return Subtask{"adapter:" + name, std::move(params), it->second.first.input_schema, it->second.first.output_schema};
}

void Node::check_assignment(const Assignment& assignment) const {
  if (assignment.pipelines.empty()) throw Error(ErrorCode::kInvalidArgument, "assignment has no pipelines");
  for (const auto& pipeline : assignment.pipelines) {
    if (pipeline.empty()) throw Error(ErrorCode::kInvalidArgument, "assignment pipeline has no subtasks");
    for (std::size_t k = 0; k < pipeline.size(); ++k) {
      const Subtask& t = pipeline[k];
      if (t.kind.starts_with("adapter:")) {
        if (!adapters_.contains(t.kind.substr(8))) throw Error(ErrorCode::kUnknownSubtask, t.kind);
      } else {
        make_subtask(t.kind, t.params);
      }
      if (k + 1 < pipeline.size() && !t.output_schema.compatible_with(pipeline[k + 1].input_schema)) {
        throw Error(ErrorCode::kSchemaViolation, "output of step " + std::to_string(k) + " (" + t.kind +
                                                     ") cannot feed step " + std::to_string(k + 1) + " (" +
                                                     pipeline[k + 1].kind + ")");
      }
    }
    if (pipeline.back().kind != "to_chain_format") {
      throw Error(ErrorCode::kInvalidArgument, "pipelines must end with to_chain_format");
    }
  }
}

Assignment Node::build_assignment(SlaId sla, const market::SlaProposal& proposal) const {
  Assignment a;
  a.id = "sla" + std::to_string(sla) + "-n" + std::to_string(index_);
  a.sla = sla;
  a.aggregator = proposal.aggregator;
  a.answer_kind = proposal.answer_kind;
  a.decimals = proposal.decimals;
  try {
    const query::QuerySpec& q = proposal.query;
    q.validate();
    std::vector<Subtask> tail;
    for (const auto& h : q.helpers) {
      switch (h.kind) {
        case query::ParsingHelper::Kind::kJson: tail.push_back(make_subtask("parse_json", {{"path", h.path}})); break;
        case query::ParsingHelper::Kind::kXml: tail.push_back(make_subtask("parse_xml", {{"path", h.path}})); break;
        case query::ParsingHelper::Kind::kXpath: tail.push_back(make_subtask("xpath", {{"expr", h.path}})); break;
        case query::ParsingHelper::Kind::kSlice:
          tail.push_back(make_subtask("slice", {{"offset", std::to_string(h.offset)}, {"length", std::to_string(h.length)}}));
          break;
      }
    }
    tail.push_back(make_subtask("to_chain_format", {{"kind", std::string(reporting::to_string(proposal.answer_kind))},
                                                    {"decimals", std::to_string(proposal.decimals)}}));

    auto fetch_for = [&](const std::string& url) {
      if (q.params.size() > 1) return make_subtask("http_post", {{"url", url}, {"body", q.params[1]}});
      return make_subtask("http_get", {{"url", url}});
    };
    std::vector<Subtask> heads;
    if (q.source == query::DataSourceType::kUrl && q.children.empty()) {
      heads.push_back(fetch_for(q.params[0]));
      for (const auto& mirror : q.mirrors) heads.push_back(fetch_for(mirror));
    } else {
      query::QuerySpec bare = q;
      bare.helpers.clear();
      bare.proof = query::ProofType::kNone;
      bare.mirrors.clear();
      heads.push_back(make_subtask("source", {{"query", bare.to_json().dump()}}));
    }
    for (auto& head : heads) {
      std::vector<Subtask> pipeline{std::move(head)};
      pipeline.insert(pipeline.end(), tail.begin(), tail.end());
      a.pipelines.push_back(std::move(pipeline));
    }
    check_assignment(a);
  } catch (const Error& e) {
    a.pipelines.clear();
    a.failure = e.what();
  }
  return a;
}

std::vector<Assignment> Node::watch_and_build(const ledger::Ledger& ledger, const market::Market& market,
                                              ledger::BlockHeight from) const {
  std::vector<Assignment> out;
  const std::string self = address_.hex();
  for (const auto& event : ledger.read_events({"sla_finalized", from})) {
    json payload = json::parse(event.payload_text());
    bool selected = false;
    for (const auto& s : payload["selected"]) selected = selected || s.get<std::string>() == self;
    if (!selected) continue;
    SlaId id = payload["sla"].get<SlaId>();
    out.push_back(build_assignment(id, market.sla(id).proposal));
  }
  return out;
}

json Node::run_subtask(const Subtask& t, const json& input) const {
  const std::string& kind = t.kind;
  if (kind == "http_get" || kind == "http_post") {
    std::string key = kind == "http_post" ? "POST " + t.params.at("url") : t.params.at("url");
    if (const std::string* doc = engine_->fixtures().find(key)) return *doc;
    throw Error(ErrorCode::kUnknownFixture, key);
  }
  if (kind == "source") {
    return engine_->execute(query::QuerySpec::from_json(json::parse(t.params.at("query")))).value;
  }
  if (kind == "parse_json") {
    if (input.is_string()) {
      json doc = json::parse(input.get<std::string>(), nullptr, false);
      if (doc.is_discarded()) throw Error(ErrorCode::kParseFailure, "json: malformed document");
      return query::json_lookup(doc, t.params.at("path"));
    }
    return query::json_lookup(input, t.params.at("path"));
  }
  if (kind == "parse_xml") return query::helper_xml(input.get<std::string>(), t.params.at("path"));
  if (kind == "xpath") return query::helper_xpath(input.get<std::string>(), t.params.at("expr"));
  if (kind == "slice") {
    return query::helper_slice(input.get<std::string>(), require_u64(t.params, "offset", kind),
                               require_u64(t.params, "length", kind));
  }
  if (kind == "to_chain_format") {
    AnswerKind answer_kind = reporting::answer_kind_from_string(t.params.at("kind"));
    auto decimals = static_cast<std::uint32_t>(t.params.contains("decimals") ? require_u64(t.params, "decimals", kind) : 0);
    AnswerValue value = to_answer(input, answer_kind, decimals);
    return json{{"kind", t.params.at("kind")}, {"canon", to_hex(reporting::canon(value))}, {"value", reporting::answer_to_json(value)}};
  }
  if (kind.starts_with("adapter:")) {
    std::string name = kind.substr(8);
    auto it = adapters_.find(name);
    if (it == adapters_.end()) throw Error(ErrorCode::kUnknownSubtask, kind);
    try {
      return it->second.second(input, t.params);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kAdapterFailure, "adapter " + name + ": " + e.what());
    }
  }
  throw Error(ErrorCode::kUnknownSubtask, kind);
}

PipelineResult Node::run_assignment(const Assignment& assignment) const {
  PipelineResult result;
  if (assignment.failed()) {
    result.error = *assignment.failure;
    return result;
  }
  auto fail = [&](std::size_t step, std::string message) {
    if (!result.failed_step) {
      result.failed_step = step;
      result.error = std::move(message);
    }
  };

  std::vector<AnswerValue> branch_values;
  std::size_t step = 0;
  for (const auto& pipeline : assignment.pipelines) {
    const std::size_t first_step = step;
    json value = nullptr;
    bool failed = false;
    for (const Subtask& t : pipeline) {
      TraceEntry entry{assignment.id, step, t.kind, value_digest(value), {}, "ok"};
      std::string prefix = "step " + std::to_string(step) + " (" + t.kind + "): ";
      if (auto v = t.input_schema.validate(value)) {
        entry.status = std::string(to_string(ErrorCode::kSchemaViolation));
        result.trace.push_back(entry);
        fail(step, prefix + "input schema violation at '" + v->path + "': " + v->message);
        failed = true;
        break;
      }
      json out;
      try {
        out = run_subtask(t, value);
      } catch (const Error& e) {
        entry.status = std::string(to_string(e.code()));
        result.trace.push_back(entry);
        fail(step, prefix + e.what());
        failed = true;
        break;
      }
      entry.output_digest = value_digest(out);
      if (auto v = t.output_schema.validate(out)) {
        entry.status = std::string(to_string(ErrorCode::kSchemaViolation));
        result.trace.push_back(entry);
        fail(step, prefix + "output schema violation at '" + v->path + "': " + v->message);
        failed = true;
        break;
      }
      result.trace.push_back(entry);
      value = std::move(out);
      ++step;
    }
    step = first_step + pipeline.size();
    if (!failed) branch_values.push_back(reporting::answer_from_json(value.at("value")));
  }

  if (branch_values.empty()) return result;
  if (branch_values.size() == 1) {
    result.value = branch_values.front();
    return result;
  }
  // Local aggregation over data sources, before anything goes on-chain.
  auto source_address = [](std::size_t i) {
    ledger::Address a;
    a.id[31] = static_cast<std::uint8_t>(i);
    a.id[30] = static_cast<std::uint8_t>(i >> 8);
    return a;
  };
  if (assignment.answer_kind == AnswerKind::kBoolean) {
    std::size_t trues = 0;
    for (const auto& v : branch_values) trues += std::get<bool>(v) ? 1 : 0;
    result.value = trues * 2 > branch_values.size();
  } else if (assignment.answer_kind == AnswerKind::kNumeric) {
    std::vector<reporting::NumericReveal> values;
    for (std::size_t i = 0; i < branch_values.size(); ++i) {
      values.emplace_back(source_address(i), std::get<Numeric>(branch_values[i]).raw);
    }
    auto method = assignment.aggregator.method == reporting::Aggregator::Method::kReputationWeighted
                      ? reporting::Aggregator::trimmed()
                      : assignment.aggregator;
    result.value = reporting::aggregate_numeric(values, method).answer;
  } else {
    result.value = branch_values.front();
  }
  return result;
}

Digest Node::draw_salt() {
  Digest salt{};
  for (std::size_t i = 0; i < 4; ++i) {
    std::uint64_t word = rng_();
    for (std::size_t b = 0; b < 8; ++b) salt[i * 8 + b] = static_cast<std::uint8_t>(word >> (56 - 8 * b));
  }
  return salt;
}

std::optional<AnswerValue> Node::choose_answer(const Assignment& assignment, const PipelineResult& result) {
  switch (behavior_.kind) {
    case Behavior::kColluding:
      // A cartel value of the wrong kind for this SLA means the node abstains.
      try {
        return parse_configured(behavior_.value, assignment.answer_kind, assignment.decimals);
      } catch (const Error&) {
        return std::nullopt;
      }
    case Behavior::kRandom: {
      if (assignment.answer_kind == AnswerKind::kBoolean) return (rng_() & 1) == 1;
      std::int64_t base = result.ok() && std::holds_alternative<Numeric>(*result.value)
                              ? std::get<Numeric>(*result.value).raw
                              : 0;
      std::uint64_t magnitude = base < 0 ? static_cast<std::uint64_t>(-(base + 1)) + 1 : static_cast<std::uint64_t>(base);
      std::uint64_t spread = std::max<std::uint64_t>(magnitude / 10, 10);
      auto offset = static_cast<std::int64_t>(rng_() % (2 * spread + 1)) - static_cast<std::int64_t>(spread);
      return Numeric{base + offset};
    }
    case Behavior::kHonest:
    case Behavior::kLazy:
    case Behavior::kEquivocating:
      return result.value;
  }
  return std::nullopt;
}

ReportAction Node::report(reporting::Reporting& reporting, const Assignment& assignment, const PipelineResult& result) {
  const SlaId sla = assignment.sla;
  reporting::Phase phase = reporting.phase(sla);
  auto pending = pending_.find(sla);

  if (phase == reporting::Phase::kCommit && pending == pending_.end()) {
    auto answer = choose_answer(assignment, result);
    if (!answer) return ReportAction::kNone;
    Pending p{*answer, *answer, draw_salt()};
    if (behavior_.kind == Behavior::kEquivocating) {
      if (auto* b = std::get_if<bool>(&p.revealed)) {
        *b = !*b;
      } else if (auto* n = std::get_if<Numeric>(&p.revealed)) {
        n->raw += 1;
      } else {
        std::get<Bytes>(p.revealed).push_back(0);
      }
    }
    reporting.commit(sla, address_, reporting::commitment_digest(sla, address_, p.committed, p.salt));
    pending_.emplace(sla, std::move(p));
    return ReportAction::kCommitted;
  }
  if (phase == reporting::Phase::kReveal && pending != pending_.end() && !pending->second.revealed_done) {
    if (behavior_.kind == Behavior::kLazy) return ReportAction::kWithheld;
    reporting.reveal(sla, address_, pending->second.revealed, pending->second.salt);
    pending->second.revealed_done = true;
    return ReportAction::kRevealed;
  }
  return ReportAction::kNone;
}

}  // namespace oraclesim::node
