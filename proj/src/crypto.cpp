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

#include "oraclesim/crypto.hpp"

#include <sodium.h>

#include <stdexcept>

namespace oraclesim::crypto {

namespace {

struct SodiumInit {
  SodiumInit() {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
  }
};

void ensure_init() { static SodiumInit init; }

crypto_hash_sha256_state* as_state(std::array<std::uint8_t, 128>& raw) {
  static_assert(sizeof(crypto_hash_sha256_state) <= 128);
  return reinterpret_cast<crypto_hash_sha256_state*>(raw.data());
}

}  // namespace

Digest sha256(std::span<const std::uint8_t> data) {
  ensure_init();
  Digest out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

Digest sha256(std::string_view text) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Sha256::Sha256() {
  ensure_init();
  crypto_hash_sha256_init(as_state(state_));
}

Sha256& Sha256::update(std::span<const std::uint8_t> data) {
  crypto_hash_sha256_update(as_state(state_), data.data(), data.size());
  return *this;
}

Sha256& Sha256::update(std::string_view text) {
  return update(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Sha256& Sha256::update_be64(std::uint64_t value) {
  Bytes buf;
  append_be64(buf, value);
  return update(buf);
}

Digest Sha256::finish() {
  Digest out{};
  crypto_hash_sha256_final(as_state(state_), out.data());
  return out;
}

Digest derive_seed(std::string_view tag, std::uint64_t value) {
  return Sha256().update(tag).update_be64(value).finish();
}

SigningKey::SigningKey(const Digest& seed) {
  ensure_init();
  crypto_sign_seed_keypair(public_key_.data(), secret_key_.data(), seed.data());
}

Signature SigningKey::sign(std::span<const std::uint8_t> message) const {
  Signature sig{};
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_key_.data());
  return sig;
}

bool verify(const PublicKey& key, std::span<const std::uint8_t> message, const Signature& signature) {
  ensure_init();
  return crypto_sign_verify_detached(signature.data(), message.data(), message.size(), key.data()) == 0;
}

BoxKey::BoxKey(const Digest& seed) {
  ensure_init();
  crypto_box_seed_keypair(public_key_.data(), secret_key_.data(), seed.data());
}

std::optional<Bytes> BoxKey::open(std::span<const std::uint8_t> ciphertext) const {
  if (ciphertext.size() < crypto_box_SEALBYTES) return std::nullopt;
  Bytes plain(ciphertext.size() - crypto_box_SEALBYTES);
  if (crypto_box_seal_open(plain.data(), ciphertext.data(), ciphertext.size(), public_key_.data(),
                           secret_key_.data()) != 0) {
    return std::nullopt;
  }
  return plain;
}

Bytes seal(const PublicKey& recipient, std::span<const std::uint8_t> plaintext) {
  ensure_init();
  Bytes out(plaintext.size() + crypto_box_SEALBYTES);
  crypto_box_seal(out.data(), plaintext.data(), plaintext.size(), recipient.data());
  return out;
}

}  // namespace oraclesim::crypto
