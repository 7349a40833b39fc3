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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oraclesim/ledger.hpp"

namespace oraclesim::patterns {

using ledger::Address;

/// Owner-written key/digest store. Reads never touch the ledger.
class ImmediateReadStore {
 public:
  ImmediateReadStore(ledger::Ledger& ledger, const Address& owner, std::string_view name);

  const Address& address() const { return address_; }
  /// Returns the new version of `key` (1 on first write).
  std::uint64_t ir_store(const Address& caller, const std::string& key, const Digest& digest);
  /// Throws Error(kUnknownKey).
  const Digest& ir_retrieve(const std::string& key) const;
  std::uint64_t version(const std::string& key) const;

 private:
  struct Entry {
    Digest digest{};
    std::uint64_t version = 0;
  };
  ledger::Ledger& ledger_;
  Address owner_;
  Address address_;
  std::map<std::string, Entry, std::less<>> entries_;
};

struct FeedValue {
  std::string value;
  std::uint64_t version = 0;
  bool operator==(const FeedValue&) const = default;
};

class PubSubFeed {
 public:
  PubSubFeed(ledger::Ledger& ledger, const Address& owner, std::string_view name);

  const Address& address() const { return address_; }
  std::uint64_t feed_publish(const Address& caller, std::string value);
  /// Latest value iff its version is newer than `last_seen_version`.
  std::optional<FeedValue> feed_poll(std::uint64_t last_seen_version) const;
  std::uint64_t version() const { return latest_.version; }

 private:
  ledger::Ledger& ledger_;
  Address owner_;
  Address address_;
  FeedValue latest_;
};

/// Subscriber-side "new data" flag: the last version it has seen.
class FeedSubscriber {
 public:
  std::optional<FeedValue> poll(const PubSubFeed& feed);
  std::uint64_t last_seen() const { return last_seen_; }

 private:
  std::uint64_t last_seen_ = 0;
};

enum class ReadMode { kFullHistory, kLatest };

class BroadcastChannel {
 public:
  BroadcastChannel(ledger::Ledger& ledger, const Address& owner, std::string_view name);

  const Address& address() const { return address_; }
  void channel_publish(const Address& caller, std::string message);
  /// kLatest on an empty channel returns an empty vector.
  std::vector<std::string> channel_read(ReadMode mode) const;

 private:
  ledger::Ledger& ledger_;
  Address owner_;
  Address address_;
  std::vector<std::string> messages_;
};

}  // namespace oraclesim::patterns
