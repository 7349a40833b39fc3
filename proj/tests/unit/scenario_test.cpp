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
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "oraclesim/error.hpp"
#include "oraclesim/scenario.hpp"
#include "support/gen.hpp"

namespace oraclesim::scenario {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using oraclesim::testing::scenario_dir;

std::string config_error(const std::string& yaml) {
  try {
    ScenarioConfig::parse(yaml, scenario_dir());
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
    return e.what();
  }
  ADD_FAILURE() << "config accepted:\n" << yaml;
  return {};
}

std::vector<json> lines_of_type(const std::vector<std::string>& metrics, const std::string& type) {
  std::vector<json> out;
  for (const auto& m : metrics) {
    auto j = json::parse(m);
    if (j["type"] == type) out.push_back(j);
  }
  return out;
}

TEST(Config, ErrorsNameLineAndField) {
  EXPECT_NE(config_error("name: x\nseed: 1\nblocks: 10\nbogus: 3\n").find("line 4: field 'bogus'"), std::string::npos);
  EXPECT_NE(config_error("name: x\nseed: abc\nblocks: 10\n").find("line 2: field 'seed'"), std::string::npos);
  auto e = config_error("name: x\nseed: 1\nblocks: 10\nnodes:\n  - count: 2\n    behavior: sleepy\n");
  EXPECT_NE(e.find("line 6"), std::string::npos) << e;
  EXPECT_NE(e.find("nodes[0].behavior"), std::string::npos) << e;
  e = config_error("name: x\nseed: 1\nblocks: 10\ninquiries:\n  - question: q\n    domain: ternary\n    quorum: 1\n    reporters: []\n");
  EXPECT_NE(e.find("line 6"), std::string::npos) << e;
  EXPECT_NE(config_error("name: [unclosed\n").find("line "), std::string::npos);
}

TEST(Config, LoadsShippedScenarios) {
  for (const char* name : {"price_feed_honest.yaml", "collusion_majority.yaml", "mixed_50_nodes.yaml",
                           "human_consensus.yaml", "sybil_headcount.yaml"}) {
    EXPECT_NO_THROW(ScenarioConfig::load(scenario_dir() / name)) << name;
  }
  auto c = ScenarioConfig::load(scenario_dir() / "price_feed_honest.yaml");
  EXPECT_EQ(c.seed, 1001u);
  ASSERT_EQ(c.slas.size(), 1u);
  EXPECT_EQ(c.slas[0].repeat_interval, 10u);
  EXPECT_EQ(c.slas[0].proposal.query.mirrors.size(), 1u);
  EXPECT_EQ(c.slas[0].proposal.aggregator, reporting::Aggregator::median());
  EXPECT_ERROR_CODE(ScenarioConfig::load(scenario_dir() / "missing.yaml"), ErrorCode::kConfigError);
}

TEST(Run, HonestFeedIsCorrectAndReplays) {
  auto out = run_scenario(ScenarioConfig::load(scenario_dir() / "price_feed_honest.yaml"));
  EXPECT_TRUE(out.violations.empty());
  EXPECT_EQ(out.metrics, out.replay_metrics);
  auto slas = lines_of_type(out.metrics, "sla");
  ASSERT_GE(slas.size(), 5u);
  for (const auto& s : slas) {
    EXPECT_EQ(s["answer"], "3012.27");
    EXPECT_EQ(s["correct"], true);
  }
  EXPECT_FALSE(out.proofs.empty());
  for (const auto& p : out.proofs) {
    EXPECT_TRUE(query::verify_proof(p.result, query::AuthenticityProof::from_json(p.proof), out.engine_key));
  }
}

TEST(Run, CollusionMajorityCapturesAnswer) {
  auto out = run_scenario(ScenarioConfig::load(scenario_dir() / "collusion_majority.yaml"));
  EXPECT_TRUE(out.ok());
  for (const auto& s : lines_of_type(out.metrics, "sla")) {
    EXPECT_EQ(s["answer"], "2500.00");
    EXPECT_EQ(s["correct"], false);
  }
}

TEST(Run, HumanConsensusOutcomes) {
  auto out = run_scenario(ScenarioConfig::load(scenario_dir() / "human_consensus.yaml"));
  EXPECT_TRUE(out.ok());
  auto q = lines_of_type(out.metrics, "inquiry");
  ASSERT_EQ(q.size(), 3u);
  EXPECT_EQ(q[0]["final"], 1);
  EXPECT_EQ(q[0]["challenged"], false);
  EXPECT_EQ(q[1]["flipped"], true);
  EXPECT_EQ(q[1]["final"], 0);
  EXPECT_EQ(q[1]["correct"], false);
  EXPECT_EQ(q[2]["challenged"], true);
  EXPECT_EQ(q[2]["flipped"], false);
  EXPECT_EQ(q[2]["final"], 0);
}

TEST(Run, HeadCountLetsSybilsWin) {
  auto config = ScenarioConfig::load(scenario_dir() / "sybil_headcount.yaml");
  auto out = run_scenario(config);
  EXPECT_EQ(lines_of_type(out.metrics, "inquiry")[0]["final"], 0);
  config.consensus.head_count = false;
  out = run_scenario(config);
  EXPECT_EQ(lines_of_type(out.metrics, "inquiry")[0]["final"], 1);
}

TEST(Run, DeterministicAndSeedSensitive) {
  auto config = ScenarioConfig::load(scenario_dir() / "mixed_50_nodes.yaml");
  auto a = run_scenario(config);
  auto b = run_scenario(config);
  EXPECT_TRUE(a.ok());
  EXPECT_EQ(a.events, b.events);
  EXPECT_EQ(a.metrics, b.metrics);
  config.parallel = !config.parallel;
  EXPECT_EQ(run_scenario(config).events, a.events);
  auto c = run_scenario(config, 4243);
  EXPECT_NE(c.events, a.events);
}

TEST(Log, RoundTripAndTruncation) {
  auto out = run_scenario(ScenarioConfig::load(scenario_dir() / "human_consensus.yaml"));
  std::string text;
  for (const auto& e : out.events) text += ledger::format_event(e) + "\n";
  std::istringstream in(text);
  auto events = read_log(in);
  EXPECT_EQ(events, out.events);
  EXPECT_EQ(replay(events), out.metrics);

  std::string cut = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  std::istringstream truncated(cut);
  EXPECT_ERROR_CODE(read_log(truncated), ErrorCode::kMalformedLog);
  std::istringstream garbage(text.substr(0, 40) + "\nnot an event\n");
  EXPECT_ERROR_CODE(read_log(garbage), ErrorCode::kMalformedLog);
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  auto tmp = fs::temp_directory_path() / "oraclesim_cli_stdout.txt";
  std::string cmd = std::string(ORACLESIM_CLI) + " " + args + " > " + tmp.string() + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream f(tmp);
    std::stringstream ss;
    ss << f.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, RunReplayVerify) {
  auto dir = fs::temp_directory_path() / "oraclesim_cli_test";
  fs::remove_all(dir);
  std::string metrics, replayed;
  ASSERT_EQ(run_cli("run " + (scenario_dir() / "price_feed_honest.yaml").string() + " --out " + dir.string(), &metrics), 0);
  ASSERT_TRUE(fs::exists(dir / "events.log"));
  EXPECT_EQ(run_cli("replay " + (dir / "events.log").string(), &replayed), 0);
  EXPECT_EQ(metrics, replayed);

  auto proof = dir / "proofs" / "sla-0.proof.json";
  auto result = dir / "proofs" / "sla-0.result";
  auto key = dir / "engine.key";
  std::string verdict;
  EXPECT_EQ(run_cli("verify " + proof.string() + " " + result.string() + " " + key.string(), &verdict), 0);
  EXPECT_EQ(verdict, "valid\n");
  std::ofstream(dir / "tampered.result") << "3012.28";
  EXPECT_EQ(run_cli("verify " + proof.string() + " " + (dir / "tampered.result").string() + " " + key.string(), &verdict), 1);
  EXPECT_EQ(verdict, "invalid\n");

  // Truncated log, bad config and usage errors exit 2.
  std::ifstream full(dir / "events.log");
  std::stringstream ss;
  ss << full.rdbuf();
  std::string text = ss.str();
  std::ofstream(dir / "cut.log") << text.substr(0, text.size() / 2);
  EXPECT_EQ(run_cli("replay " + (dir / "cut.log").string()), 2);
  std::ofstream(dir / "bad.yaml") << "name: x\nseed: nope\n";
  EXPECT_EQ(run_cli("run " + (dir / "bad.yaml").string()), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  fs::remove_all(dir);
}

TEST(Cli, TwoRunsAreByteIdentical) {
  auto a = fs::temp_directory_path() / "oraclesim_det_a";
  auto b = fs::temp_directory_path() / "oraclesim_det_b";
  auto cfg = (scenario_dir() / "mixed_50_nodes.yaml").string();
  ASSERT_EQ(run_cli("run " + cfg + " --out " + a.string()), 0);
  ASSERT_EQ(run_cli("run " + cfg + " --out " + b.string()), 0);
  for (const char* f : {"events.log", "metrics.jsonl"}) {
    std::ifstream fa(a / f), fb(b / f);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    EXPECT_EQ(sa.str(), sb.str()) << f;
    EXPECT_FALSE(sa.str().empty());
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

}  // namespace
}  // namespace oraclesim::scenario
