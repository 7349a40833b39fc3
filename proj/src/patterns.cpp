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

#include "oraclesim/patterns.hpp"

#include <json.hpp>

#include "oraclesim/error.hpp"

namespace oraclesim::patterns {

using nlohmann::json;

namespace {

void require_owner(const Address& owner, const Address& caller, std::string_view what) {
  if (caller != owner) throw Error(ErrorCode::kNotOwner, std::string(what) + ": caller " + caller.hex() + " is not the owner");
}

}  // namespace

ImmediateReadStore::ImmediateReadStore(ledger::Ledger& ledger, const Address& owner, std::string_view name)
    : ledger_(ledger), owner_(owner), address_(ledger.register_contract("ir-store/" + std::string(name))) {}

std::uint64_t ImmediateReadStore::ir_store(const Address& caller, const std::string& key, const Digest& digest) {
  require_owner(owner_, caller, "ir_store");
  Entry& e = entries_[key];
  e.digest = digest;
  ++e.version;
  ledger_.emit(address_, "ir_stored", json{{"key", key}, {"digest", to_hex(digest)}, {"version", e.version}}.dump());
  return e.version;
}

const Digest& ImmediateReadStore::ir_retrieve(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw Error(ErrorCode::kUnknownKey, key);
  return it->second.digest;
}

std::uint64_t ImmediateReadStore::version(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.version;
}

PubSubFeed::PubSubFeed(ledger::Ledger& ledger, const Address& owner, std::string_view name)
    : ledger_(ledger), owner_(owner), address_(ledger.register_contract("feed/" + std::string(name))) {}

std::uint64_t PubSubFeed::feed_publish(const Address& caller, std::string value) {
  require_owner(owner_, caller, "feed_publish");
  latest_.value = std::move(value);
  ++latest_.version;
  ledger_.emit(address_, "feed_published", json{{"version", latest_.version}, {"value", latest_.value}}.dump());
  return latest_.version;
}

std::optional<FeedValue> PubSubFeed::feed_poll(std::uint64_t last_seen_version) const {
  if (latest_.version > last_seen_version) return latest_;
  return std::nullopt;
}

std::optional<FeedValue> FeedSubscriber::poll(const PubSubFeed& feed) {
  auto v = feed.feed_poll(last_seen_);
  if (v) last_seen_ = v->version;
  return v;
}

BroadcastChannel::BroadcastChannel(ledger::Ledger& ledger, const Address& owner, std::string_view name)
    : ledger_(ledger), owner_(owner), address_(ledger.register_contract("channel/" + std::string(name))) {}

void BroadcastChannel::channel_publish(const Address& caller, std::string message) {
  require_owner(owner_, caller, "channel_publish");
  messages_.push_back(std::move(message));
  ledger_.emit(address_, "channel_published", json{{"index", messages_.size() - 1}, {"message", messages_.back()}}.dump());
}

std::vector<std::string> BroadcastChannel::channel_read(ReadMode mode) const {
  if (mode == ReadMode::kFullHistory) return messages_;
  if (messages_.empty()) return {};
  return {messages_.back()};
}

}  // namespace oraclesim::patterns
