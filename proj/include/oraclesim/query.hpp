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
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oraclesim/bytes.hpp"
#include "oraclesim/crypto.hpp"
#include "oraclesim/ledger.hpp"

namespace oraclesim::query {

enum class DataSourceType {
  kUrl,
  kWolframAlpha,  // canned answers from the fixture registry
  kContentStore,  // local content-addressed documents
  kRandom,
  kComputation,
  kNested,
  kIdentity,
  kDecrypt,
};

std::string_view to_string(DataSourceType type);
DataSourceType source_from_string(std::string_view name);

struct ParsingHelper {
  enum class Kind { kJson, kXml, kXpath, kSlice };

  Kind kind = Kind::kJson;
  std::string path;  // json / xml path or xpath expression
  std::uint64_t offset = 0;
  std::uint64_t length = 0;

  static ParsingHelper json(std::string path) { return {Kind::kJson, std::move(path)}; }
  static ParsingHelper xml(std::string path) { return {Kind::kXml, std::move(path)}; }
  static ParsingHelper xpath(std::string expr) { return {Kind::kXpath, std::move(expr)}; }
  static ParsingHelper slice(std::uint64_t offset, std::uint64_t length) {
    return {Kind::kSlice, {}, offset, length};
  }

  std::string apply(std::string_view input) const;
  nlohmann::json to_json() const;
  static ParsingHelper from_json(const nlohmann::json& j);
  bool operator==(const ParsingHelper&) const = default;
};

/// Applies helpers left to right, each consuming the previous result.
std::string apply_helpers(std::string value, std::span<const ParsingHelper> helpers);

enum class ProofType { kNone, kSignature };

/// A data request: source type, parameter array, parsing helpers and the
/// requested proof type.
///
/// `children` are sub-queries evaluated first; the placeholder `${i}` in any
/// parameter is replaced by the result of child i. A Nested source returns the
/// concatenation of its substituted parameters, or when the first one has the form
/// `[Type] rest`, evaluates `rest` under source `Type`.
///
/// `mirrors` lists additional URL keys serving the same document; an oracle
/// node fetches all of them and aggregates locally.
struct QuerySpec {
  DataSourceType source = DataSourceType::kIdentity;
  std::vector<std::string> params;
  std::vector<ParsingHelper> helpers;
  ProofType proof = ProofType::kNone;
  std::vector<QuerySpec> children;
  std::vector<std::string> mirrors;

  /// Throws Error(kInvalidArgument) when params are empty or fields are
  /// inconsistent with the source type.
  void validate() const;
  nlohmann::json to_json() const;
  static QuerySpec from_json(const nlohmann::json& j);
  Digest digest() const;
  bool operator==(const QuerySpec&) const = default;
};

struct AuthenticityProof {
  Digest query_digest{};
  Digest result_digest{};
  ledger::BlockHeight height{};
  crypto::PublicKey signer{};
  crypto::Signature signature{};

  /// query_digest || result_digest || big-endian height
  Bytes signed_message() const;
  nlohmann::json to_json() const;
  static AuthenticityProof from_json(const nlohmann::json& j);
};

/// True iff the result hashes to result_digest, the signer is `key` and the
/// signature verifies. Never throws.
bool verify_proof(std::string_view result, const AuthenticityProof& proof, const crypto::PublicKey& key);
/// Additionally binds the proof to a specific query.
bool verify_proof(std::string_view result, const AuthenticityProof& proof, const crypto::PublicKey& key,
                  const Digest& query_digest);

/// Documents addressed by URL-string key.
class FixtureRegistry {
 public:
  void add(std::string key, std::string document);
  const std::string* find(std::string_view key) const;
  std::size_t size() const { return documents_.size(); }

  /// JSON manifest: {"fixtures": [{"key": ..., "path": ..., "sha256": ...}]}
  /// with paths relative to the manifest. Digests are verified on load.
  static FixtureRegistry load_manifest(const std::filesystem::path& manifest);

 private:
  std::map<std::string, std::string, std::less<>> documents_;
};

using Computation = std::function<std::string(std::span<const std::string>)>;

struct RandomResult {
  Bytes bytes;
  AuthenticityProof proof;
};

class QueryEngine {
 public:
  struct Result {
    std::string value;
    std::optional<AuthenticityProof> proof;
  };

  QueryEngine(std::uint64_t seed, std::shared_ptr<const FixtureRegistry> fixtures);

  /// Fetch from the source, apply helpers, attest when a proof is requested.
  /// `request_id` keys Random sources that carry no explicit id.
  Result execute(const QuerySpec& spec, ledger::BlockHeight height = {}, std::string_view request_id = {}) const;
  /// Source evaluation only, before helpers.
  std::string fetch(const QuerySpec& spec) const;

  RandomResult random_bytes(std::size_t n, std::string_view request_id, ledger::BlockHeight height = {}) const;

  /// Hex ciphertext sealed to the engine's box key.
  std::string encrypt_param(std::string_view plaintext) const;
  std::string decrypt_param(std::string_view hex_ciphertext) const;

  AuthenticityProof attest(const Digest& query_digest, std::string_view result, ledger::BlockHeight height) const;

  void register_computation(std::string name, Computation fn);
  /// Stores a document in the local content store; returns its hex digest.
  std::string put_content(std::string document);

  const crypto::PublicKey& public_key() const { return signing_.public_key(); }
  const crypto::PublicKey& box_public_key() const { return box_.public_key(); }
  const FixtureRegistry& fixtures() const { return *fixtures_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::string evaluate_source(DataSourceType source, const std::vector<std::string>& params,
                              const QuerySpec& spec) const;

  std::uint64_t seed_;
  std::shared_ptr<const FixtureRegistry> fixtures_;
  crypto::SigningKey signing_;
  crypto::BoxKey box_;
  std::map<std::string, Computation, std::less<>> computations_;
  std::map<std::string, std::string, std::less<>> content_;
};

}  // namespace oraclesim::query
