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

#include <gtest/gtest.h>

#include "oraclesim/error.hpp"
#include "oraclesim/node.hpp"
#include "support/world.hpp"

namespace oraclesim::node {
namespace {

using ledger::TokenAmount;
using nlohmann::json;
using query::ParsingHelper;
using reporting::AnswerValue;
using reporting::Numeric;
using oraclesim::testing::World;

constexpr const char* kKraken = "https://api.kraken.com/0/public/Ticker?pair=ETHUSD";
constexpr const char* kMirror = "https://mirror.example.org/0/public/Ticker?pair=ETHUSD";

std::shared_ptr<const query::QueryEngine> engine() {
  static auto e = std::make_shared<const query::QueryEngine>(
      1, std::make_shared<const query::FixtureRegistry>(query::FixtureRegistry::load_manifest(oraclesim::testing::fixture_manifest())));
  return e;
}

market::SlaProposal price_proposal(std::string path = "result.XETHZUSD.c.0") {
  auto p = oraclesim::testing::numeric_proposal(1);
  p.query.source = query::DataSourceType::kUrl;
  p.query.params = {kKraken};
  p.query.helpers = {ParsingHelper::json(std::move(path))};
  p.decimals = 2;
  return p;
}

Node make_node(NodeId i = 0, BehaviorSpec b = {}) {
  Address a;
  a.id[0] = static_cast<std::uint8_t>(i + 1);
  return Node(i, a, 99, engine(), std::move(b));
}

TEST(Subtasks, BuiltinSchemas) {
  EXPECT_EQ(make_subtask("http_get", {{"url", "u"}}).output_schema.types(), std::set<std::string>{"string"});
  EXPECT_ERROR_CODE(make_subtask("http_get"), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(make_subtask("http_post", {{"url", "u"}}), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(make_subtask("slice", {{"offset", "1"}, {"length", "x"}}), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(make_subtask("to_chain_format", {{"kind", "float"}}), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(make_subtask("ftp_get", {{"url", "u"}}), ErrorCode::kUnknownSubtask);
  EXPECT_EQ(make_subtask("parse_json", {{"path", "a"}}).input_schema.types(),
            (std::set<std::string>{"string", "object", "array"}));
}

TEST(Behaviors, ParseAndPrint) {
  EXPECT_EQ(BehaviorSpec::from_json("lazy").kind, Behavior::kLazy);
  EXPECT_EQ(BehaviorSpec::from_json("equivocating").kind, Behavior::kEquivocating);
  auto c = BehaviorSpec::from_json(json{{"colluding", {{"group", "g1"}, {"value", "2500.00"}}}});
  EXPECT_EQ(c.kind, Behavior::kColluding);
  EXPECT_EQ(c.to_string(), "colluding(g1,2500.00)");
  EXPECT_EQ(BehaviorSpec::from_json(json{{"colluding", {{"value", 7}}}}).value, "7");
  EXPECT_ERROR_CODE(BehaviorSpec::from_json("sleepy"), ErrorCode::kConfigError);
  EXPECT_ERROR_CODE(BehaviorSpec::from_json(json{{"colluding", {{"group", "g"}}}}), ErrorCode::kConfigError);
}

TEST(Assignment, UrlPipeline) {
  Node n = make_node(3);
  Assignment a = n.build_assignment(5, price_proposal());
  ASSERT_FALSE(a.failed()) << *a.failure;
  EXPECT_EQ(a.id, "sla5-n3");
  ASSERT_EQ(a.pipelines.size(), 1u);
  std::vector<std::string> kinds;
  for (const auto& t : a.subtasks()) kinds.push_back(t.kind);
  EXPECT_EQ(kinds, (std::vector<std::string>{"http_get", "parse_json", "to_chain_format"}));
  auto r = n.run_assignment(a);
  ASSERT_TRUE(r.ok()) << r.error;
  EXPECT_EQ(*r.value, AnswerValue{Numeric{301227}});
  ASSERT_EQ(r.trace.size(), 3u);
  EXPECT_EQ(r.trace[1].step, 1u);
  EXPECT_EQ(r.trace[1].input_digest, r.trace[0].output_digest);
  EXPECT_EQ(r.trace[2].status, "ok");
  EXPECT_EQ(format_trace(r.trace[0]).substr(0, 17), "sla5-n3 0 http_ge");
}

TEST(Assignment, MirrorsAggregateLocally) {
  Node n = make_node();
  auto p = price_proposal("result.XETHZUSD.a.0");
  p.query.mirrors = {kMirror};
  Assignment a = n.build_assignment(0, p);
  ASSERT_EQ(a.pipelines.size(), 2u);
  auto r = n.run_assignment(a);
  ASSERT_TRUE(r.ok()) << r.error;
  // 3012.45 and 3012.50: median of two is floor((301245 + 301250) / 2).
  EXPECT_EQ(*r.value, AnswerValue{Numeric{301247}});
  EXPECT_EQ(r.trace.size(), 6u);
  EXPECT_EQ(r.trace[3].step, 3u);
}

TEST(Assignment, OneFailingMirrorStillAnswers) {
  Node n = make_node();
  auto p = price_proposal();
  p.query.mirrors = {"https://down.example.org/ticker"};
  auto r = n.run_assignment(n.build_assignment(0, p));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r.value, AnswerValue{Numeric{301227}});
  EXPECT_EQ(r.failed_step, 3u);
  EXPECT_EQ(r.trace.back().status, "unknown-fixture");
}

TEST(Assignment, FailureIsRecordedAtTheStep) {
  Node n = make_node();
  auto r = n.run_assignment(n.build_assignment(0, price_proposal("result.XXBTZUSD.c.0")));
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.failed_step, 1u);
  EXPECT_EQ(r.trace.back().status, "path-miss");
  // Numeric answer requested from a non-numeric value.
  auto r2 = n.run_assignment(n.build_assignment(0, price_proposal("result.XETHZUSD.a")));
  EXPECT_FALSE(r2.ok());
  EXPECT_EQ(r2.failed_step, 2u);
  EXPECT_EQ(r2.trace.back().status, "schema-violation");
}

TEST(Assignment, NonUrlSourcesBecomeOneSubtask) {
  Node n = make_node();
  auto p = oraclesim::testing::numeric_proposal(1);
  p.query.source = query::DataSourceType::kComputation;
  p.query.params = {"sum", "40", "2"};
  Assignment a = n.build_assignment(0, p);
  ASSERT_FALSE(a.failed());
  EXPECT_EQ(a.subtasks().front().kind, "source");
  EXPECT_EQ(*n.run_assignment(a).value, AnswerValue{Numeric{42}});
}

TEST(Assignment, BooleanFromXml) {
  Node n = make_node();
  auto p = oraclesim::testing::boolean_proposal(1, 1);
  p.query.source = query::DataSourceType::kUrl;
  p.query.params = {"https://flights.example.org/status/LH400"};
  p.query.helpers = {ParsingHelper::json("flight.status.delayed")};
  EXPECT_EQ(*n.run_assignment(n.build_assignment(0, p)).value, AnswerValue{true});
  p.query.params = {"https://fuel.example.org/prices.xml"};
  p.query.helpers = {ParsingHelper::xml("fuel/station/diesel")};
  p.answer_kind = reporting::AnswerKind::kNumeric;
  p.aggregator = reporting::Aggregator::median();
  p.decimals = 3;
  EXPECT_EQ(*n.run_assignment(n.build_assignment(0, p)).value, AnswerValue{Numeric{1739}});
}

TEST(Assignment, InvalidQueryMarksFailure) {
  Node n = make_node();
  auto p = price_proposal();
  p.query.params.clear();
  Assignment a = n.build_assignment(0, p);
  EXPECT_TRUE(a.failed());
  auto r = n.run_assignment(a);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(r.trace.empty());
}

TEST(Adapters, RegisteredAdapterRunsWithSchemas) {
  Node n = make_node();
  n.register_adapter({"double", Schema::of_type("string"), Schema::of_type("string")},
                     [](const json& in, const Params&) { return json(std::to_string(std::stol(in.get<std::string>()) * 2)); });
  EXPECT_ERROR_CODE(n.register_adapter({"double", {}, {}}, nullptr), ErrorCode::kDuplicate);
  EXPECT_ERROR_CODE(n.adapter_subtask("triple"), ErrorCode::kUnknownSubtask);
  Assignment a;
  a.id = "manual";
  a.pipelines = {{make_subtask("source", {{"query", R"({"source":"Identity","params":["21"]})"}}), n.adapter_subtask("double"),
                  make_subtask("to_chain_format", {{"kind", "numeric"}})}};
  EXPECT_NO_THROW(n.check_assignment(a));
  EXPECT_EQ(*n.run_assignment(a).value, AnswerValue{Numeric{42}});

  n.register_adapter({"boom", {}, {}}, [](const json&, const Params&) -> json { throw std::runtime_error("down"); });
  a.pipelines[0][1] = n.adapter_subtask("boom");
  auto r = n.run_assignment(a);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.trace.back().status, "adapter-failure");

  // An adapter returning the wrong type trips its output schema.
  n.register_adapter({"liar", Schema::of_type("string"), Schema::of_type("string")},
                     [](const json&, const Params&) { return json(5); });
  a.pipelines[0][1] = n.adapter_subtask("liar");
  r = n.run_assignment(a);
  EXPECT_EQ(r.failed_step, 1u);
  EXPECT_EQ(r.trace.back().status, "schema-violation");
}

TEST(Adapters, CheckRejectsIncompatibleNeighbours) {
  Node n = make_node();
  n.register_adapter({"numbers", Schema::of_type("string"), Schema::of_type("array")},
                     [](const json&, const Params&) { return json::array(); });
  Assignment a;
  a.pipelines = {{make_subtask("http_get", {{"url", kKraken}}), n.adapter_subtask("numbers"),
                  make_subtask("slice", {{"offset", "0"}, {"length", "1"}}), make_subtask("to_chain_format", {{"kind", "numeric"}})}};
  EXPECT_ERROR_CODE(n.check_assignment(a), ErrorCode::kSchemaViolation);
  a.pipelines = {{make_subtask("http_get", {{"url", kKraken}})}};
  EXPECT_ERROR_CODE(n.check_assignment(a), ErrorCode::kInvalidArgument);
  a.pipelines = {{Subtask{"adapter:ghost", {}, {}, {}}, make_subtask("to_chain_format", {{"kind", "numeric"}})}};
  EXPECT_ERROR_CODE(n.check_assignment(a), ErrorCode::kUnknownSubtask);
  a.pipelines.clear();
  EXPECT_ERROR_CODE(n.check_assignment(a), ErrorCode::kInvalidArgument);
}

struct Reported {
  World w;
  std::vector<Node> nodes;
  market::SlaId id = 0;

  Reported(std::vector<BehaviorSpec> behaviors, market::SlaProposal p) {
    auto purchaser = w.ledger.create_account(TokenAmount{10'000});
    std::vector<Address> addrs;
    for (std::size_t i = 0; i < behaviors.size(); ++i) {
      addrs.push_back(w.ledger.create_account(TokenAmount{100}));
      nodes.emplace_back(static_cast<NodeId>(i), addrs.back(), 5, engine(), behaviors[i]);
    }
    p.oracles_needed = static_cast<std::uint32_t>(behaviors.size());
    id = w.market.propose_manual(purchaser, p, addrs);
    std::vector<Assignment> as;
    std::vector<PipelineResult> rs;
    for (auto& n : nodes) {
      auto built = n.watch_and_build(w.ledger, w.market, {0});
      as.push_back(built.at(0));
      rs.push_back(n.run_assignment(as.back()));
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) actions.push_back(nodes[i].report(w.reporting, as[i], rs[i]));
    w.advance_to(w.market.sla(id).commit_closes());
    for (std::size_t i = 0; i < nodes.size(); ++i) actions.push_back(nodes[i].report(w.reporting, as[i], rs[i]));
    w.advance_to(w.market.sla(id).reveal_closes());
    result = w.reporting.finalize_aggregation(id);
  }
  bool valid(std::size_t i) const { return w.market.sla(id).validity.at(nodes[i].address()); }

  std::vector<ReportAction> actions;
  reporting::AggregationResult result;
};

TEST(Behaviors, HonestLazyEquivocating) {
  Reported r({{}, {}, {}, {Behavior::kLazy, {}, {}}, {Behavior::kEquivocating, {}, {}}}, price_proposal());
  EXPECT_EQ(r.result.answer, AnswerValue{Numeric{301227}});
  EXPECT_TRUE(r.valid(0));
  EXPECT_FALSE(r.valid(3));  // withheld
  EXPECT_FALSE(r.valid(4));  // reveal does not match its commitment
  EXPECT_EQ(r.actions[5 + 3], ReportAction::kWithheld);
  EXPECT_EQ(r.actions[5 + 4], ReportAction::kRevealed);
  EXPECT_FALSE(r.w.reporting.revealed_value(r.id, r.nodes[4].address()).has_value());
}

TEST(Behaviors, ColludersAbstainOnKindMismatch) {
  auto p = oraclesim::testing::boolean_proposal(2, 3);
  p.query.params = {"true"};
  BehaviorSpec cartel{Behavior::kColluding, "g", "2500.00"};
  Reported r({{}, {}, cartel}, p);
  EXPECT_EQ(r.actions[2], ReportAction::kNone);
  EXPECT_EQ(r.result.answer, AnswerValue{true});
  EXPECT_FALSE(r.valid(2));
}

TEST(Behaviors, ColludingMajorityWins) {
  BehaviorSpec cartel{Behavior::kColluding, "g", "2500.00"};
  Reported r({{}, {}, cartel, cartel, cartel}, price_proposal());
  EXPECT_EQ(r.result.answer, AnswerValue{Numeric{250000}});
  EXPECT_FALSE(r.valid(0));
}

TEST(Behaviors, RandomIsSeededPerNode) {
  auto run = [] {
    Reported r({{Behavior::kRandom, {}, {}}, {Behavior::kRandom, {}, {}}}, price_proposal());
    return std::make_pair(*r.w.reporting.revealed_value(r.id, r.nodes[0].address()),
                          *r.w.reporting.revealed_value(r.id, r.nodes[1].address()));
  };
  auto a = run(), b = run();
  EXPECT_EQ(a, b);
  EXPECT_NE(a.first, a.second);
  auto v = std::get<Numeric>(a.first).raw;
  EXPECT_LE(std::abs(v - 301227), 30122);
}

}  // namespace
}  // namespace oraclesim::node
