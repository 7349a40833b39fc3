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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oraclesim/consensus.hpp"
#include "oraclesim/crypto.hpp"
#include "oraclesim/ledger.hpp"
#include "oraclesim/market.hpp"
#include "oraclesim/node.hpp"
#include "oraclesim/query.hpp"

namespace oraclesim::scenario {

struct NodeGroup {
  std::size_t count = 1;
  ledger::TokenAmount balance{1000};
  node::BehaviorSpec behavior;
};

struct SlaScript {
  std::string name;
  std::uint64_t start = 0;
  ledger::TokenAmount purchaser_balance{1000};
  std::optional<std::string> truth;
  std::uint64_t repeat_interval = 0;  // 0: single shot
  std::optional<std::uint64_t> repeat_until;
  bool encrypt = false;
  market::SlaProposal proposal;
};

struct ReporterGroup {
  std::size_t count = 1;
  ledger::TokenAmount stake{100};
  consensus::Answer answer = 0;
};

struct ChallengeScript {
  consensus::Answer claimed = 0;
  std::uint64_t delay = 1;  // blocks after resolution
  ledger::TokenAmount challenger_balance{100};
  std::vector<ledger::TokenAmount> support;
  std::vector<ledger::TokenAmount> dispute;
};

struct InquiryScript {
  std::string question;
  consensus::AnswerDomain domain;
  std::uint32_t quorum = 1;
  ledger::TokenAmount deposit{10};
  std::uint64_t open_at = 0;
  std::optional<consensus::Answer> truth;  // scoring only
  std::vector<ReporterGroup> reporters;
  std::optional<ChallengeScript> challenge;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  std::uint64_t blocks = 0;
  std::filesystem::path fixtures;  // manifest, resolved against the config directory
  ledger::TokenAmount fee{0};
  bool parallel = true;
  consensus::ConsensusOptions consensus;
  std::vector<NodeGroup> nodes;
  std::vector<SlaScript> slas;
  std::vector<InquiryScript> inquiries;

  /// Throws Error(kConfigError) naming the line and field at fault.
  static ScenarioConfig parse(const std::string& text, const std::filesystem::path& base_dir);
  static ScenarioConfig load(const std::filesystem::path& path);
};

struct ProofArtifact {
  std::string name;  // file stem
  nlohmann::json proof;
  std::string result;
};

struct RunOutput {
  std::vector<ledger::LedgerEvent> events;
  std::vector<std::string> metrics;         // computed from live state
  std::vector<std::string> replay_metrics;  // recomputed from the log alone
  std::vector<std::string> violations;      // invariant failures; non-empty fails the run
  std::vector<ProofArtifact> proofs;
  crypto::PublicKey engine_key{};

  bool ok() const { return violations.empty() && metrics == replay_metrics; }
};

/// Deterministic for a given config and seed.
RunOutput run_scenario(const ScenarioConfig& config, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Metrics lines derived from an event log only. Throws
/// Error(kMalformedLog) on an inconsistent log.
std::vector<std::string> replay(const std::vector<ledger::LedgerEvent>& events);

/// Parses a log written by Ledger::export_log. Malformed lines and logs that
/// do not end in a matching `run_end` marker throw Error(kMalformedLog) with
/// the line number.
std::vector<ledger::LedgerEvent> read_log(std::istream& in);

}  // namespace oraclesim::scenario
