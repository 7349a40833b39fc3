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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "oraclesim/bytes.hpp"

// Thin wrappers over libsodium: SHA-256, Ed25519 detached signatures and
// X25519 sealed boxes. Every key pair is derived from a 32-byte seed so a
// scenario seed reproduces the same keys.
namespace oraclesim::crypto {

using PublicKey = std::array<std::uint8_t, 32>;
using Signature = std::array<std::uint8_t, 64>;

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view text);

class Sha256 {
 public:
  Sha256();
  Sha256& update(std::span<const std::uint8_t> data);
  Sha256& update(std::string_view text);
  Sha256& update_be64(std::uint64_t value);
  Digest finish();

 private:
  alignas(64) std::array<std::uint8_t, 128> state_{};
};

/// 32-byte seed derived from a domain tag and a 64-bit value.
Digest derive_seed(std::string_view tag, std::uint64_t value);

class SigningKey {
 public:
  explicit SigningKey(const Digest& seed);
  Signature sign(std::span<const std::uint8_t> message) const;
  const PublicKey& public_key() const { return public_key_; }

 private:
  PublicKey public_key_{};
  std::array<std::uint8_t, 64> secret_key_{};
};

bool verify(const PublicKey& key, std::span<const std::uint8_t> message, const Signature& signature);

/// Anonymous public-key encryption (crypto_box_seal). Encryption is randomized;
/// decryption is deterministic.
class BoxKey {
 public:
  explicit BoxKey(const Digest& seed);
  const PublicKey& public_key() const { return public_key_; }
  std::optional<Bytes> open(std::span<const std::uint8_t> ciphertext) const;

 private:
  PublicKey public_key_{};
  std::array<std::uint8_t, 32> secret_key_{};
};

Bytes seal(const PublicKey& recipient, std::span<const std::uint8_t> plaintext);

}  // namespace oraclesim::crypto
