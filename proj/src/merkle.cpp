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

#include "oraclesim/merkle.hpp"

#include "oraclesim/crypto.hpp"
#include "oraclesim/error.hpp"
#include "oraclesim/kernels.hpp"

namespace oraclesim::patterns {

Digest merkle_leaf(std::span<const std::uint8_t> data, const Digest& salt) {
  crypto::Sha256 h;
  const std::uint8_t tag = 0x00;
  h.update(std::span(&tag, 1));
  h.update(salt);
  h.update(data);
  return h.finish();
}

Digest merkle_interior(const Digest& left, const Digest& right) {
  crypto::Sha256 h;
  const std::uint8_t tag = 0x01;
  h.update(std::span(&tag, 1));
  h.update(left);
  h.update(right);
  return h.finish();
}

const Digest& merkle_padding() {
  static const Digest pad = [] {
    const std::uint8_t tag = 0x00;
    return crypto::sha256(std::span(&tag, 1));
  }();
  return pad;
}

SaltedMerkleTree::SaltedMerkleTree(std::vector<Bytes> leaves, std::vector<Digest> salts, bool parallel)
    : leaves_(std::move(leaves)), salts_(std::move(salts)) {
  if (leaves_.empty()) throw Error(ErrorCode::kInvalidArgument, "merkle tree needs at least one leaf");
  if (leaves_.size() != salts_.size()) throw Error(ErrorCode::kInvalidArgument, "one salt per leaf");

  std::vector<Digest> level = parallel ? kernels::merkle_leaves_parallel(leaves_, salts_)
                                       : kernels::merkle_leaves_serial(leaves_, salts_);
  std::size_t width = 1;
  while (width < level.size()) width *= 2;
  level.resize(width, merkle_padding());
  levels_.push_back(std::move(level));
  while (levels_.back().size() > 1) {
    levels_.push_back(parallel ? kernels::merkle_parents_parallel(levels_.back())
                               : kernels::merkle_parents_serial(levels_.back()));
  }
}

MerkleProof SaltedMerkleTree::prove(std::size_t index) const {
  if (index >= leaves_.size()) {
    throw Error(ErrorCode::kOutOfBounds, "leaf " + std::to_string(index) + " of " + std::to_string(leaves_.size()));
  }
  MerkleProof proof{index, {}};
  std::size_t i = index;
  for (std::size_t d = 0; d + 1 < levels_.size(); ++d) {
    proof.siblings.push_back(levels_[d][i ^ 1]);
    i >>= 1;
  }
  return proof;
}

bool SaltedMerkleTree::verify(const Digest& root, std::span<const std::uint8_t> data, const Digest& salt,
                              const MerkleProof& proof) {
  if (proof.siblings.size() >= 64 || (proof.index >> proof.siblings.size()) != 0) return false;
  Digest node = merkle_leaf(data, salt);
  std::size_t i = proof.index;
  for (const Digest& sibling : proof.siblings) {
    node = (i & 1) ? merkle_interior(sibling, node) : merkle_interior(node, sibling);
    i >>= 1;
  }
  return node == root;
}

}  // namespace oraclesim::patterns
