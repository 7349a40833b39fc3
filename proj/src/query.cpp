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

#include "oraclesim/query.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "oraclesim/error.hpp"
#include "oraclesim/helpers.hpp"

namespace oraclesim::query {

using nlohmann::json;

namespace {

constexpr std::pair<DataSourceType, std::string_view> kSourceNames[] = {
    {DataSourceType::kUrl, "URL"},
    {DataSourceType::kWolframAlpha, "WolframAlpha"},
    {DataSourceType::kContentStore, "ContentStore"},
    {DataSourceType::kRandom, "Random"},
    {DataSourceType::kComputation, "Computation"},
    {DataSourceType::kNested, "Nested"},
    {DataSourceType::kIdentity, "Identity"},
    {DataSourceType::kDecrypt, "Decrypt"},
};

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": not an unsigned integer: '" + std::string(text) + "'");
  }
  return value;
}

std::int64_t parse_i64(std::string_view text) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument, "not an integer: '" + std::string(text) + "'");
  }
  return value;
}

// Highest `${i}` index referenced by a parameter, or -1.
long max_placeholder(std::string_view param) {
  long best = -1;
  std::size_t pos = 0;
  while ((pos = param.find("${", pos)) != std::string_view::npos) {
    std::size_t close = param.find('}', pos);
    if (close == std::string_view::npos) throw Error(ErrorCode::kInvalidArgument, "unterminated placeholder");
    best = std::max<long>(best, static_cast<long>(parse_u64(param.substr(pos + 2, close - pos - 2), "placeholder")));
    pos = close + 1;
  }
  return best;
}

std::string substitute(std::string_view param, const std::vector<std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = param.find("${", pos);
    if (open == std::string_view::npos) break;
    std::size_t close = param.find('}', open);
    out.append(param.substr(pos, open - pos));
    out.append(values.at(parse_u64(param.substr(open + 2, close - open - 2), "placeholder")));
    pos = close + 1;
  }
  out.append(param.substr(pos));
  return out;
}

// Parses "json(a.b)", "xml(r/p)", "xpath(/r/p)" or "slice(0, 4)".
ParsingHelper helper_from_call(std::string_view text) {
  std::size_t open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    throw Error(ErrorCode::kInvalidArgument, "malformed helper '" + std::string(text) + "'");
  }
  std::string_view name = text.substr(0, open);
  std::string_view arg = text.substr(open + 1, text.size() - open - 2);
  if (name == "json") return ParsingHelper::json(std::string(arg));
  if (name == "xml") return ParsingHelper::xml(std::string(arg));
  if (name == "xpath") return ParsingHelper::xpath(std::string(arg));
  if (name == "slice") {
    std::size_t comma = arg.find(',');
    if (comma == std::string_view::npos) throw Error(ErrorCode::kInvalidArgument, "slice needs (offset, length)");
    auto trim = [](std::string_view s) {
      while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
      while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
      return s;
    };
    return ParsingHelper::slice(parse_u64(trim(arg.substr(0, comma)), "slice offset"),
                                parse_u64(trim(arg.substr(comma + 1)), "slice length"));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown helper '" + std::string(name) + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string_view to_string(DataSourceType type) {
  for (const auto& [t, name] : kSourceNames) {
    if (t == type) return name;
  }
  return "unknown";
}

DataSourceType source_from_string(std::string_view name) {
  for (const auto& [t, n] : kSourceNames) {
    if (n == name) return t;
  }
  if (name == "IPFS") return DataSourceType::kContentStore;
  throw Error(ErrorCode::kInvalidArgument, "unknown data source type '" + std::string(name) + "'");
}

std::string ParsingHelper::apply(std::string_view input) const {
  switch (kind) {
    case Kind::kJson: return helper_json(input, path);
    case Kind::kXml: return helper_xml(input, path);
    case Kind::kXpath: return helper_xpath(input, path);
    case Kind::kSlice: return helper_slice(input, offset, length);
  }
  return {};
}

nlohmann::json ParsingHelper::to_json() const {
  using nlohmann::json;
  switch (kind) {
    case Kind::kJson: return json{{"json", path}};
    case Kind::kXml: return json{{"xml", path}};
    case Kind::kXpath: return json{{"xpath", path}};
    case Kind::kSlice: return json{{"slice", json::array({offset, length})}};
  }
  return {};
}

ParsingHelper ParsingHelper::from_json(const nlohmann::json& j) {
  if (j.is_string()) return helper_from_call(j.get<std::string>());
  if (!j.is_object() || j.size() != 1) throw Error(ErrorCode::kInvalidArgument, "helper must be a single-key object");
  const auto& [name, arg] = *j.items().begin();
  if (name == "slice") {
    if (!arg.is_array() || arg.size() != 2 || !arg[0].is_number_unsigned() || !arg[1].is_number_unsigned()) {
      throw Error(ErrorCode::kInvalidArgument, "slice needs [offset, length]");
    }
    return ParsingHelper::slice(arg[0].get<std::uint64_t>(), arg[1].get<std::uint64_t>());
  }
  if (!arg.is_string()) throw Error(ErrorCode::kInvalidArgument, "helper '" + name + "' needs a string argument");
  if (name == "json") return ParsingHelper::json(arg.get<std::string>());
  if (name == "xml") return ParsingHelper::xml(arg.get<std::string>());
  if (name == "xpath") return ParsingHelper::xpath(arg.get<std::string>());
  throw Error(ErrorCode::kInvalidArgument, "unknown helper '" + name + "'");
}

std::string apply_helpers(std::string value, std::span<const ParsingHelper> helpers) {
  for (const auto& helper : helpers) value = helper.apply(value);
  return value;
}

void QuerySpec::validate() const {
  if (params.empty()) throw Error(ErrorCode::kInvalidArgument, "query needs at least one parameter");
  for (const auto& p : params) {
    if (max_placeholder(p) >= static_cast<long>(children.size())) {
      throw Error(ErrorCode::kInvalidArgument, "placeholder refers to a missing sub-query in '" + p + "'");
    }
  }
  if (!mirrors.empty() && source != DataSourceType::kUrl) {
    throw Error(ErrorCode::kInvalidArgument, "mirrors are only valid for URL sources");
  }
  if (source == DataSourceType::kRandom && params[0].find("${") == std::string::npos &&
      parse_u64(params[0], "random byte count") == 0) {
    throw Error(ErrorCode::kInvalidArgument, "random byte count must be positive");
  }
  if (source == DataSourceType::kUrl && params.size() > 2) {
    throw Error(ErrorCode::kInvalidArgument, "URL takes a url and an optional POST payload");
  }
  for (const auto& child : children) child.validate();
}

json QuerySpec::to_json() const {
  json j{{"source", std::string(query::to_string(source))},
         {"params", params},
         {"proof", proof == ProofType::kSignature ? "signature" : "none"}};
  json hs = json::array();
  for (const auto& h : helpers) hs.push_back(h.to_json());
  j["helpers"] = std::move(hs);
  if (!children.empty()) {
    json cs = json::array();
    for (const auto& c : children) cs.push_back(c.to_json());
    j["children"] = std::move(cs);
  }
  if (!mirrors.empty()) j["mirrors"] = mirrors;
  return j;
}

QuerySpec QuerySpec::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "query must be an object");
  QuerySpec spec;
  try {
    spec.source = source_from_string(j.at("source").get<std::string>());
    spec.params = j.at("params").get<std::vector<std::string>>();
    if (j.contains("helpers")) {
      for (const auto& h : j.at("helpers")) spec.helpers.push_back(ParsingHelper::from_json(h));
    }
    if (j.contains("proof")) {
      auto proof = j.at("proof").get<std::string>();
      if (proof == "signature") {
        spec.proof = ProofType::kSignature;
      } else if (proof != "none") {
        throw Error(ErrorCode::kInvalidArgument, "unknown proof type '" + proof + "'");
      }
    }
    if (j.contains("children")) {
      for (const auto& c : j.at("children")) spec.children.push_back(from_json(c));
    }
    if (j.contains("mirrors")) spec.mirrors = j.at("mirrors").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("query: ") + e.what());
  }
  return spec;
}

Digest QuerySpec::digest() const { return crypto::Sha256().update("ORACLE-QUERY-V1").update(to_json().dump()).finish(); }

Bytes AuthenticityProof::signed_message() const {
  Bytes msg;
  append(msg, query_digest);
  append(msg, result_digest);
  append_be64(msg, height.value);
  return msg;
}

json AuthenticityProof::to_json() const {
  return json{{"query_digest", to_hex(query_digest)},
              {"result_digest", to_hex(result_digest)},
              {"height", height.value},
              {"signer", to_hex(signer)},
              {"signature", to_hex(signature)}};
}

AuthenticityProof AuthenticityProof::from_json(const json& j) {
  AuthenticityProof p;
  try {
    p.query_digest = digest_from_hex(j.at("query_digest").get<std::string>());
    p.result_digest = digest_from_hex(j.at("result_digest").get<std::string>());
    p.height = ledger::BlockHeight{j.at("height").get<std::uint64_t>()};
    p.signer = digest_from_hex(j.at("signer").get<std::string>());
    Bytes sig = from_hex(j.at("signature").get<std::string>());
    if (sig.size() != p.signature.size()) throw Error(ErrorCode::kParseFailure, "signature must be 64 bytes");
    std::copy(sig.begin(), sig.end(), p.signature.begin());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseFailure, std::string("proof: ") + e.what());
  }
  return p;
}

bool verify_proof(std::string_view result, const AuthenticityProof& proof, const crypto::PublicKey& key) {
  if (proof.signer != key) return false;
  if (crypto::sha256(result) != proof.result_digest) return false;
  return crypto::verify(key, proof.signed_message(), proof.signature);
}

bool verify_proof(std::string_view result, const AuthenticityProof& proof, const crypto::PublicKey& key,
                  const Digest& query_digest) {
  return proof.query_digest == query_digest && verify_proof(result, proof, key);
}

void FixtureRegistry::add(std::string key, std::string document) { documents_[std::move(key)] = std::move(document); }

const std::string* FixtureRegistry::find(std::string_view key) const {
  auto it = documents_.find(key);
  return it == documents_.end() ? nullptr : &it->second;
}

FixtureRegistry FixtureRegistry::load_manifest(const std::filesystem::path& manifest) {
  json j = json::parse(read_file(manifest), nullptr, false);
  if (j.is_discarded() || !j.contains("fixtures") || !j["fixtures"].is_array()) {
    throw Error(ErrorCode::kConfigError, manifest.string() + ": expected {\"fixtures\": [...]}");
  }
  FixtureRegistry registry;
  const auto base = manifest.parent_path();
  for (const auto& entry : j["fixtures"]) {
    if (!entry.is_object() || !entry.contains("key") || !entry.contains("path") || !entry.contains("sha256")) {
      throw Error(ErrorCode::kConfigError, manifest.string() + ": fixture entries need key, path and sha256");
    }
    auto key = entry["key"].get<std::string>();
    std::string document = read_file(base / entry["path"].get<std::string>());
    std::string actual = to_hex(crypto::sha256(document));
    std::string expected = entry["sha256"].get<std::string>();
    std::transform(expected.begin(), expected.end(), expected.begin(), [](unsigned char c) { return std::tolower(c); });
    if (actual != expected) {
      throw Error(ErrorCode::kFixtureDigestMismatch, key + ": expected " + expected + ", got " + actual);
    }
    registry.add(std::move(key), std::move(document));
  }
  return registry;
}

QueryEngine::QueryEngine(std::uint64_t seed, std::shared_ptr<const FixtureRegistry> fixtures)
    : seed_(seed),
      fixtures_(fixtures ? std::move(fixtures) : std::make_shared<const FixtureRegistry>()),
      signing_(crypto::derive_seed("ORACLE-ENGINE-SIGN-V1", seed)),
      box_(crypto::derive_seed("ORACLE-ENGINE-BOX-V1", seed)) {
  register_computation("concat", [](std::span<const std::string> args) {
    std::string out;
    for (const auto& a : args) out += a;
    return out;
  });
  register_computation("sum", [](std::span<const std::string> args) {
    std::int64_t total = 0;
    for (const auto& a : args) {
      if (__builtin_add_overflow(total, parse_i64(a), &total)) throw Error(ErrorCode::kOverflow, "sum overflow");
    }
    return std::to_string(total);
  });
  register_computation("sha256", [](std::span<const std::string> args) {
    crypto::Sha256 h;
    for (const auto& a : args) h.update(a);
    return to_hex(h.finish());
  });
}

void QueryEngine::register_computation(std::string name, Computation fn) { computations_[std::move(name)] = std::move(fn); }

std::string QueryEngine::put_content(std::string document) {
  std::string key = to_hex(crypto::sha256(document));
  content_[key] = std::move(document);
  return key;
}

std::string QueryEngine::evaluate_source(DataSourceType source, const std::vector<std::string>& params,
                                         const QuerySpec& spec) const {
  switch (source) {
    case DataSourceType::kUrl: {
      std::string key = params.size() > 1 ? "POST " + params[0] : params[0];
      if (const std::string* doc = fixtures_->find(key)) return *doc;
      throw Error(ErrorCode::kUnknownFixture, key);
    }
    case DataSourceType::kWolframAlpha: {
      std::string key = "wolframalpha:" + params[0];
      if (const std::string* doc = fixtures_->find(key)) return *doc;
      throw Error(ErrorCode::kUnknownFixture, key);
    }
    case DataSourceType::kContentStore: {
      if (auto it = content_.find(params[0]); it != content_.end()) return it->second;
      throw Error(ErrorCode::kUnknownFixture, "content " + params[0]);
    }
    case DataSourceType::kRandom: {
      std::string id = params.size() > 1 ? params[1] : to_hex(spec.digest());
      auto out = random_bytes(parse_u64(params[0], "random byte count"), id);
      return oraclesim::to_string(out.bytes);
    }
    case DataSourceType::kComputation: {
      auto it = computations_.find(params[0]);
      if (it == computations_.end()) throw Error(ErrorCode::kUnknownComputation, params[0]);
      return it->second(std::span(params).subspan(1));
    }
    case DataSourceType::kNested: {
      std::string_view body = params[0];
      if (body.starts_with('[')) {
        std::size_t close = body.find("] ");
        if (close == std::string_view::npos) throw Error(ErrorCode::kInvalidArgument, "nested: expected '[Type] argument'");
        DataSourceType inner = source_from_string(body.substr(1, close - 1));
        std::vector<std::string> inner_params{std::string(body.substr(close + 2))};
        inner_params.insert(inner_params.end(), params.begin() + 1, params.end());
        return evaluate_source(inner, inner_params, spec);
      }
      std::string out;
      for (const auto& p : params) out += p;
      return out;
    }
    case DataSourceType::kIdentity: return params[0];
    case DataSourceType::kDecrypt: return decrypt_param(params[0]);
  }
  throw Error(ErrorCode::kInvalidArgument, "unsupported source");
}

std::string QueryEngine::fetch(const QuerySpec& spec) const {
  spec.validate();
  std::vector<std::string> child_values;
  child_values.reserve(spec.children.size());
  for (const auto& child : spec.children) child_values.push_back(execute(child).value);
  std::vector<std::string> params;
  params.reserve(spec.params.size());
  for (const auto& p : spec.params) params.push_back(substitute(p, child_values));
  return evaluate_source(spec.source, params, spec);
}

QueryEngine::Result QueryEngine::execute(const QuerySpec& spec, ledger::BlockHeight height,
                                         std::string_view request_id) const {
  QuerySpec effective = spec;
  if (!request_id.empty() && spec.source == DataSourceType::kRandom && spec.params.size() == 1) {
    effective.params.emplace_back(request_id);
  }
  Result result;
  result.value = apply_helpers(fetch(effective), spec.helpers);
  if (spec.proof == ProofType::kSignature) result.proof = attest(spec.digest(), result.value, height);
  return result;
}

RandomResult QueryEngine::random_bytes(std::size_t n, std::string_view request_id, ledger::BlockHeight height) const {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "random byte count must be positive");
  RandomResult out;
  out.bytes.reserve(n);
  for (std::uint64_t counter = 0; out.bytes.size() < n; ++counter) {
    Digest block = crypto::Sha256()
                       .update("ORACLE-RANDOM-V1")
                       .update_be64(seed_)
                       .update_be64(request_id.size())
                       .update(request_id)
                       .update_be64(counter)
                       .finish();
    std::size_t take = std::min(block.size(), n - out.bytes.size());
    out.bytes.insert(out.bytes.end(), block.begin(), block.begin() + static_cast<long>(take));
  }
  Digest query_digest =
      crypto::Sha256().update("ORACLE-RANDOM-QUERY-V1").update_be64(n).update(request_id).finish();
  out.proof = attest(query_digest, oraclesim::to_string(out.bytes), height);
  return out;
}

std::string QueryEngine::encrypt_param(std::string_view plaintext) const {
  return to_hex(crypto::seal(box_.public_key(), to_bytes(plaintext)));
}

std::string QueryEngine::decrypt_param(std::string_view hex_ciphertext) const {
  Bytes cipher;
  try {
    cipher = from_hex(hex_ciphertext);
  } catch (const Error&) {
    throw Error(ErrorCode::kDecryptFailure, "ciphertext is not hex");
  }
  auto plain = box_.open(cipher);
  if (!plain) throw Error(ErrorCode::kDecryptFailure, "ciphertext rejected (wrong key or corrupted)");
  return oraclesim::to_string(*plain);
}

AuthenticityProof QueryEngine::attest(const Digest& query_digest, std::string_view result,
                                      ledger::BlockHeight height) const {
  AuthenticityProof proof;
  proof.query_digest = query_digest;
  proof.result_digest = crypto::sha256(result);
  proof.height = height;
  proof.signer = signing_.public_key();
  proof.signature = signing_.sign(proof.signed_message());
  return proof;
}

}  // namespace oraclesim::query
