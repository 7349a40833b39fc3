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

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "oraclesim/error.hpp"
#include "oraclesim/scenario.hpp"

namespace oraclesim::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const YAML::Node& at, const std::string& field, const std::string& message) {
  const YAML::Mark mark = at.Mark();
  std::string where = mark.is_null() ? std::string("config") : "line " + std::to_string(mark.line + 1);
  throw Error(ErrorCode::kConfigError, where + ": field '" + field + "': " + message);
}

void only_keys(const YAML::Node& map, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!map.IsMap()) fail(map, path, "expected a mapping");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : map) {
    auto key = kv.first.as<std::string>();
    if (!ok.contains(key)) fail(kv.first, path.empty() ? key : path + "." + key, "unknown field");
  }
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

template <typename T>
T as(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, field, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, field, "cannot read '" + node.Scalar() + "'");
  }
}

template <typename T>
T get(const YAML::Node& map, const char* key, const std::string& path, T fallback) {
  YAML::Node n = map[key];
  if (!n) return fallback;
  return as<T>(n, join(path, key));
}

template <typename T>
T require(const YAML::Node& map, const char* key, const std::string& path) {
  YAML::Node n = map[key];
  if (!n) fail(map, join(path, key), "required");
  return as<T>(n, join(path, key));
}

ledger::TokenAmount amount(const YAML::Node& map, const char* key, const std::string& path,
                           ledger::TokenAmount fallback) {
  return ledger::TokenAmount{get<std::uint64_t>(map, key, path, fallback.units())};
}

// Scalars stay strings; the query and behavior parsers decide what they mean.
json to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Scalar: return node.Scalar();
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (const auto& item : node) arr.push_back(to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = to_json(kv.second);
      return obj;
    }
    default: return nullptr;
  }
}

template <typename F>
auto wrap(const YAML::Node& at, const std::string& field, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    fail(at, field, e.what());
  }
}

consensus::Answer parse_answer(const YAML::Node& node, const std::string& field) {
  auto text = as<std::string>(node, field);
  if (text == "true") return 1;
  if (text == "false") return 0;
  return as<std::int64_t>(node, field);
}

consensus::AnswerDomain parse_domain(const YAML::Node& node, const std::string& field) {
  auto text = as<std::string>(node, field);
  if (text == "boolean") return consensus::AnswerDomain::boolean();
  if (text == "numeric") return consensus::AnswerDomain::numeric();
  if (text.starts_with("categorical(") && text.ends_with(")")) {
    try {
      auto k = std::stoul(text.substr(12, text.size() - 13));
      return consensus::AnswerDomain::categorical(static_cast<std::uint32_t>(k));
    } catch (const std::exception&) {
    }
  }
  fail(node, field, "expected boolean, numeric or categorical(k)");
}

NodeGroup parse_node_group(const YAML::Node& n, const std::string& path) {
  only_keys(n, path, {"count", "balance", "behavior"});
  NodeGroup g;
  g.count = get<std::size_t>(n, "count", path, 1);
  g.balance = amount(n, "balance", path, g.balance);
  if (YAML::Node b = n["behavior"]) {
    g.behavior = wrap(b, join(path, "behavior"), [&] { return node::BehaviorSpec::from_json(to_json(b)); });
  }
  return g;
}

SlaScript parse_sla(const YAML::Node& n, const std::string& path) {
  only_keys(n, path,
            {"name", "start", "purchaser_balance", "truth", "repeat", "encrypt", "oracles", "bidding_window",
             "commit_window", "reveal_window", "penalty", "reward", "aggregator", "answer", "decimals",
             "min_reputation", "query"});
  SlaScript s;
  s.name = require<std::string>(n, "name", path);
  s.start = get<std::uint64_t>(n, "start", path, 0);
  s.purchaser_balance = amount(n, "purchaser_balance", path, s.purchaser_balance);
  if (n["truth"]) s.truth = as<std::string>(n["truth"], join(path, "truth"));
  s.encrypt = get<bool>(n, "encrypt", path, false);
  if (YAML::Node r = n["repeat"]) {
    std::string rp = join(path, "repeat");
    only_keys(r, rp, {"interval", "until"});
    s.repeat_interval = require<std::uint64_t>(r, "interval", rp);
    if (s.repeat_interval == 0) fail(r, join(rp, "interval"), "must be positive");
    if (r["until"]) s.repeat_until = as<std::uint64_t>(r["until"], join(rp, "until"));
  }
  auto& p = s.proposal;
  p.oracles_needed = get<std::uint32_t>(n, "oracles", path, 1);
  p.bidding_window = get<std::uint64_t>(n, "bidding_window", path, 1);
  if (n["commit_window"]) p.commit_window = as<std::uint64_t>(n["commit_window"], join(path, "commit_window"));
  if (n["reveal_window"]) p.reveal_window = as<std::uint64_t>(n["reveal_window"], join(path, "reveal_window"));
  p.penalty = amount(n, "penalty", path, p.penalty);
  p.reward = amount(n, "reward", path, p.reward);
  p.min_reputation = get<double>(n, "min_reputation", path, 0.0);
  p.decimals = get<std::uint32_t>(n, "decimals", path, 0);
  if (YAML::Node a = n["aggregator"]) {
    p.aggregator = wrap(a, join(path, "aggregator"),
                        [&] { return reporting::Aggregator::from_string(as<std::string>(a, join(path, "aggregator"))); });
  }
  if (YAML::Node k = n["answer"]) {
    p.answer_kind = wrap(k, join(path, "answer"),
                         [&] { return reporting::answer_kind_from_string(as<std::string>(k, join(path, "answer"))); });
  }
  YAML::Node q = n["query"];
  if (!q) fail(n, join(path, "query"), "required");
  p.query = wrap(q, join(path, "query"), [&] { return query::QuerySpec::from_json(to_json(q)); });
  wrap(n, path, [&] {
    p.validate();
    return 0;
  });
  if (s.truth) {
    wrap(n["truth"], join(path, "truth"), [&] {
      if (p.answer_kind == reporting::AnswerKind::kNumeric) reporting::parse_fixed(*s.truth, p.decimals);
      if (p.answer_kind == reporting::AnswerKind::kBoolean && *s.truth != "true" && *s.truth != "false") {
        throw Error(ErrorCode::kParseFailure, "boolean truth must be true or false");
      }
      return 0;
    });
  }
  return s;
}

InquiryScript parse_inquiry(const YAML::Node& n, const std::string& path) {
  only_keys(n, path, {"question", "domain", "quorum", "deposit", "open_at", "truth", "reporters", "challenge"});
  InquiryScript s;
  s.question = get<std::string>(n, "question", path, "");
  if (n["domain"]) s.domain = parse_domain(n["domain"], join(path, "domain"));
  s.quorum = require<std::uint32_t>(n, "quorum", path);
  s.deposit = amount(n, "deposit", path, s.deposit);
  s.open_at = get<std::uint64_t>(n, "open_at", path, 0);
  if (n["truth"]) s.truth = parse_answer(n["truth"], join(path, "truth"));
  YAML::Node reps = n["reporters"];
  if (!reps || !reps.IsSequence()) fail(n, join(path, "reporters"), "expected a list");
  for (std::size_t i = 0; i < reps.size(); ++i) {
    std::string rp = join(path, "reporters") + "[" + std::to_string(i) + "]";
    only_keys(reps[i], rp, {"count", "stake", "answer"});
    ReporterGroup g;
    g.count = get<std::size_t>(reps[i], "count", rp, 1);
    g.stake = amount(reps[i], "stake", rp, g.stake);
    if (!reps[i]["answer"]) fail(reps[i], join(rp, "answer"), "required");
    g.answer = parse_answer(reps[i]["answer"], join(rp, "answer"));
    s.reporters.push_back(g);
  }
  if (YAML::Node c = n["challenge"]) {
    std::string cp = join(path, "challenge");
    only_keys(c, cp, {"claimed", "delay", "challenger_balance", "support", "dispute"});
    ChallengeScript ch;
    if (!c["claimed"]) fail(c, join(cp, "claimed"), "required");
    ch.claimed = parse_answer(c["claimed"], join(cp, "claimed"));
    ch.delay = get<std::uint64_t>(c, "delay", cp, 1);
    ch.challenger_balance = amount(c, "challenger_balance", cp, ch.challenger_balance);
    for (const char* side : {"support", "dispute"}) {
      YAML::Node list = c[side];
      if (!list) continue;
      if (!list.IsSequence()) fail(list, join(cp, side), "expected a list of amounts");
      auto& out = std::string(side) == "support" ? ch.support : ch.dispute;
      for (const auto& a : list) out.emplace_back(as<std::uint64_t>(a, join(cp, side)));
    }
    s.challenge = ch;
  }
  return s;
}

}  // namespace

ScenarioConfig ScenarioConfig::parse(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::kConfigError, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  only_keys(root, "", {"name", "seed", "blocks", "fixtures", "fee", "parallel", "consensus", "nodes", "slas", "inquiries"});
  ScenarioConfig c;
  c.name = get<std::string>(root, "name", "", c.name);
  c.seed = require<std::uint64_t>(root, "seed", "");
  c.blocks = require<std::uint64_t>(root, "blocks", "");
  c.fee = amount(root, "fee", "", c.fee);
  c.parallel = get<bool>(root, "parallel", "", true);
  if (YAML::Node f = root["fixtures"]) {
    std::filesystem::path p = as<std::string>(f, "fixtures");
    c.fixtures = p.is_absolute() ? p : base_dir / p;
  }
  if (YAML::Node cs = root["consensus"]) {
    only_keys(cs, "consensus", {"head_count", "challenge_deposit", "challenge_window"});
    c.consensus.head_count = get<bool>(cs, "head_count", "consensus", false);
    c.consensus.challenge_deposit = amount(cs, "challenge_deposit", "consensus", c.consensus.challenge_deposit);
    c.consensus.challenge_window = get<std::uint64_t>(cs, "challenge_window", "consensus", c.consensus.challenge_window);
    if (c.consensus.challenge_window == 0) fail(cs, "consensus.challenge_window", "must be positive");
  }
  auto list = [&](const char* key) {
    YAML::Node n = root[key];
    if (n && !n.IsSequence()) fail(n, key, "expected a list");
    return n;
  };
  if (YAML::Node nodes = list("nodes")) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      c.nodes.push_back(parse_node_group(nodes[i], "nodes[" + std::to_string(i) + "]"));
    }
  }
  std::set<std::string> names;
  if (YAML::Node slas = list("slas")) {
    for (std::size_t i = 0; i < slas.size(); ++i) {
      std::string path = "slas[" + std::to_string(i) + "]";
      c.slas.push_back(parse_sla(slas[i], path));
      if (!names.insert(c.slas.back().name).second) fail(slas[i]["name"], join(path, "name"), "duplicate SLA name");
    }
  }
  if (YAML::Node inq = list("inquiries")) {
    for (std::size_t i = 0; i < inq.size(); ++i) {
      c.inquiries.push_back(parse_inquiry(inq[i], "inquiries[" + std::to_string(i) + "]"));
    }
  }
  if (!c.slas.empty() && c.fixtures.empty()) fail(root, "fixtures", "required when slas are present");
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.parent_path());
}

}  // namespace oraclesim::scenario
