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

#include <span>
#include <vector>

#include "oraclesim/bytes.hpp"

namespace oraclesim::patterns {

/// SHA256(0x00 || salt || data).
Digest merkle_leaf(std::span<const std::uint8_t> data, const Digest& salt);
/// SHA256(0x01 || left || right).
Digest merkle_interior(const Digest& left, const Digest& right);
/// Fills empty slots up to the next power of two: SHA256(0x00).
const Digest& merkle_padding();

struct MerkleProof {
  std::size_t index = 0;
  std::vector<Digest> siblings;  // bottom-up
};

class SaltedMerkleTree {
 public:
  /// Throws Error(kInvalidArgument) on empty input or mismatched lengths.
  SaltedMerkleTree(std::vector<Bytes> leaves, std::vector<Digest> salts, bool parallel = true);

  const Digest& root() const { return levels_.back().front(); }
  std::size_t depth() const { return levels_.size() - 1; }
  std::size_t size() const { return leaves_.size(); }

  /// Throws Error(kOutOfBounds) for an index past the real leaves.
  MerkleProof prove(std::size_t index) const;

  static bool verify(const Digest& root, std::span<const std::uint8_t> data, const Digest& salt,
                     const MerkleProof& proof);

 private:
  std::vector<Bytes> leaves_;
  std::vector<Digest> salts_;
  std::vector<std::vector<Digest>> levels_;  // levels_[0] = padded leaf digests
};

}  // namespace oraclesim::patterns
