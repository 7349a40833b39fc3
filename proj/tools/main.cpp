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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oraclesim/error.hpp"
#include "oraclesim/query.hpp"
#include "oraclesim/scenario.hpp"

namespace fs = std::filesystem;
using oraclesim::Error;
using namespace oraclesim;

namespace {

constexpr int kExitFailed = 1;  // invariant violation, metrics mismatch, proof rejected
constexpr int kExitError = 2;   // unreadable or malformed input

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  out << content;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir) {
  auto config = scenario::ScenarioConfig::load(config_path);
  auto result = scenario::run_scenario(config, seed);

  std::string metrics;
  for (const auto& line : result.metrics) metrics += line + "\n";
  std::cout << metrics;

  if (!out_dir.empty()) {
    fs::path dir(out_dir);
    fs::create_directories(dir / "proofs");
    std::string log;
    for (const auto& e : result.events) log += ledger::format_event(e) + "\n";
    write_file(dir / "events.log", log);
    write_file(dir / "metrics.jsonl", metrics);
    write_file(dir / "engine.key", to_hex(result.engine_key) + "\n");
    for (const auto& p : result.proofs) {
      write_file(dir / "proofs" / (p.name + ".proof.json"), p.proof.dump(2) + "\n");
      write_file(dir / "proofs" / (p.name + ".result"), p.result);
    }
  }

  int status = 0;
  for (const auto& v : result.violations) {
    std::cerr << "invariant violated: " << v << "\n";
    status = kExitFailed;
  }
  if (result.metrics != result.replay_metrics) {
    std::cerr << "metrics recomputed from the event log differ from the live metrics\n";
    status = kExitFailed;
  }
  return status;
}

int cmd_replay(const std::string& log_path) {
  std::ifstream in(log_path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read " + log_path);
  for (const auto& line : scenario::replay(scenario::read_log(in))) std::cout << line << "\n";
  return 0;
}

int cmd_verify(const std::string& proof_path, const std::string& result_path, const std::string& key_path) {
  auto proof_json = nlohmann::json::parse(slurp(proof_path), nullptr, false);
  if (proof_json.is_discarded()) throw Error(ErrorCode::kParseFailure, proof_path + ": not JSON");
  auto proof = query::AuthenticityProof::from_json(proof_json);
  std::string key_text = slurp(key_path);
  while (!key_text.empty() && std::isspace(static_cast<unsigned char>(key_text.back()))) key_text.pop_back();
  Bytes key_bytes = from_hex(key_text);
  if (key_bytes.size() != crypto::PublicKey{}.size()) throw Error(ErrorCode::kParseFailure, key_path + ": not a 32-byte key");
  crypto::PublicKey key{};
  std::copy(key_bytes.begin(), key_bytes.end(), key.begin());

  bool ok = query::verify_proof(slurp(result_path), proof, key);
  std::cout << (ok ? "valid" : "invalid") << "\n";
  return ok ? 0 : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized oracle network simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, log_path, proof_path, result_path, key_path;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Run a scenario and print its metrics");
  run->add_option("config", config_path, "Scenario config (YAML or JSON)")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out_dir, "Write events.log, metrics.jsonl, engine.key and proofs/ here");

  auto* rep = app.add_subcommand("replay", "Recompute metrics from an event log");
  rep->add_option("log", log_path, "events.log from a previous run")->required();

  auto* ver = app.add_subcommand("verify", "Check an authenticity proof; exit 0 iff valid");
  ver->add_option("proof", proof_path)->required();
  ver->add_option("result", result_path)->required();
  ver->add_option("key", key_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; usage errors share the input-error code
    return app.exit(e) == 0 ? 0 : kExitError;
  }

  try {
    if (*run) return cmd_run(config_path, seed, out_dir);
    if (*rep) return cmd_replay(log_path);
    if (*ver) return cmd_verify(proof_path, result_path, key_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
