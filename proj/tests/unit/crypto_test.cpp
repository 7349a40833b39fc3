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

#include "oraclesim/bytes.hpp"
#include "oraclesim/crypto.hpp"
#include "oraclesim/error.hpp"
#include "support/gen.hpp"

namespace oraclesim::crypto {
namespace {

TEST(Bytes, HexRoundTrip) {
  Bytes b{0x00, 0x7f, 0xff, 0x10};
  EXPECT_EQ(to_hex(b), "007fff10");
  EXPECT_EQ(from_hex("007FFF10"), b);
  EXPECT_ERROR_CODE(from_hex("abc"), ErrorCode::kParseFailure);
  EXPECT_ERROR_CODE(from_hex("zz"), ErrorCode::kParseFailure);
  EXPECT_ERROR_CODE(digest_from_hex("00"), ErrorCode::kParseFailure);
}

TEST(Bytes, BigEndianAppend) {
  Bytes b;
  append_be64(b, 0x0102030405060708ULL);
  EXPECT_EQ(to_hex(b), "0102030405060708");
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(to_hex(sha256("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(to_hex(sha256("")), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256().update("a").update("bc").finish(), sha256("abc"));
}

TEST(Sha256, DeriveSeedIsTagThenBigEndianValue) {
  Bytes msg = to_bytes("tag");
  append_be64(msg, 42);
  EXPECT_EQ(derive_seed("tag", 42), sha256(msg));
  EXPECT_NE(derive_seed("tag", 42), derive_seed("tag", 43));
}

TEST(Signatures, SignVerifyAndReject) {
  SigningKey key(derive_seed("test", 1));
  SigningKey other(derive_seed("test", 2));
  Bytes msg = to_bytes("hello");
  Signature sig = key.sign(msg);
  EXPECT_TRUE(verify(key.public_key(), msg, sig));
  EXPECT_FALSE(verify(other.public_key(), msg, sig));
  Bytes tampered = msg;
  tampered[0] ^= 1;
  EXPECT_FALSE(verify(key.public_key(), tampered, sig));
  sig[5] ^= 0x40;
  EXPECT_FALSE(verify(key.public_key(), msg, sig));
  EXPECT_EQ(SigningKey(derive_seed("test", 1)).public_key(), key.public_key());
}

TEST(SealedBox, RoundTripAndWrongKey) {
  BoxKey key(derive_seed("box", 1));
  BoxKey other(derive_seed("box", 2));
  Bytes plain = to_bytes("secret parameter");
  Bytes sealed = seal(key.public_key(), plain);
  EXPECT_EQ(key.open(sealed), plain);
  EXPECT_FALSE(other.open(sealed).has_value());
  sealed.back() ^= 1;
  EXPECT_FALSE(key.open(sealed).has_value());
}

}  // namespace
}  // namespace oraclesim::crypto
