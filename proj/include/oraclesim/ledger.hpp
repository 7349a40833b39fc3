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

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "oraclesim/bytes.hpp"

// Deterministic single-chain state machine: accounts, balances, escrows,
// a named-contract registry and an append-only event log indexed by block
// height.
namespace oraclesim::ledger {

struct Address {
  Digest id{};

  auto operator<=>(const Address&) const = default;
  std::string hex() const { return to_hex(id); }
  static Address from_hex(std::string_view hex);
};

/// Indivisible token units. Arithmetic is checked and throws on overflow
/// or underflow instead of wrapping.
class TokenAmount {
 public:
  constexpr TokenAmount() = default;
  constexpr explicit TokenAmount(std::uint64_t units) : units_(units) {}

  constexpr std::uint64_t units() const { return units_; }
  auto operator<=>(const TokenAmount&) const = default;

  TokenAmount operator+(TokenAmount other) const;
  TokenAmount operator-(TokenAmount other) const;
  TokenAmount& operator+=(TokenAmount other) { return *this = *this + other; }
  TokenAmount& operator-=(TokenAmount other) { return *this = *this - other; }

 private:
  std::uint64_t units_ = 0;
};

struct BlockHeight {
  std::uint64_t value = 0;
  auto operator<=>(const BlockHeight&) const = default;
  BlockHeight operator+(std::uint64_t blocks) const { return BlockHeight{value + blocks}; }
};

using EscrowId = std::uint64_t;

struct LedgerEvent {
  Address emitter;
  std::string topic;
  Bytes payload;
  BlockHeight height;
  std::uint64_t seq = 0;

  std::string payload_text() const { return to_string(payload); }
  bool operator==(const LedgerEvent&) const = default;
};

/// Topic matches exactly, or by prefix when it ends in '*'. An empty topic
/// matches everything. Heights are inclusive.
struct EventFilter {
  std::string topic;
  BlockHeight from{0};
  BlockHeight to{std::numeric_limits<std::uint64_t>::max()};

  bool matches(const LedgerEvent& event) const;
};

struct Escrow {
  Address owner;
  Address holder;
  TokenAmount amount;
  bool open = true;
};

/// One record per line: `height seq emitter topic payload-hex`.
std::string format_event(const LedgerEvent& event);
LedgerEvent parse_event(std::string_view line);

class Ledger {
 public:
  Ledger() = default;

  Address create_account(TokenAmount initial_balance);
  /// Zero-balance account with a stable, name-derived address.
  Address register_contract(std::string_view name);
  std::optional<Address> contract(std::string_view name) const;

  bool exists(const Address& address) const { return balances_.contains(address); }
  TokenAmount balance(const Address& address) const;
  /// Sum of open escrows owned by `address`.
  TokenAmount escrowed_by(const Address& address) const;

  void transfer(const Address& from, const Address& to, TokenAmount amount);
  EscrowId escrow(const Address& owner, const Address& holder, TokenAmount amount);
  void release(EscrowId id, const Address& to);
  const Escrow& escrow_info(EscrowId id) const;

  const LedgerEvent& emit(const Address& emitter, std::string_view topic, Bytes payload);
  const LedgerEvent& emit(const Address& emitter, std::string_view topic, std::string_view payload) {
    return emit(emitter, topic, to_bytes(payload));
  }
  std::vector<LedgerEvent> read_events(const EventFilter& filter) const;
  const std::vector<LedgerEvent>& events() const { return events_; }

  BlockHeight advance_block();
  BlockHeight height() const { return height_; }

  TokenAmount total_supply() const { return supply_; }
  TokenAmount total_balances() const;
  TokenAmount total_open_escrows() const;
  bool conserved() const;
  /// Throws Error(kInvariantViolation) when balances plus open escrows differ
  /// from minted supply.
  void check_conservation() const;

  /// Flat per-transaction fee charged on transfers and escrows initiated by
  /// non-contract accounts, paid to the fee sink. Zero disables fees.
  void set_flat_fee(TokenAmount fee);
  TokenAmount flat_fee() const { return fee_; }
  const Address& fee_sink() const { return fee_sink_; }

  /// When enabled (default) token movements are mirrored into the event log
  /// under topics `mint`, `transfer`, `escrow`, `release` and `fee`.
  void set_token_events(bool enabled) { token_events_ = enabled; }

  void export_log(std::ostream& out) const;

 private:
  void charge_fee(const Address& payer);
  void require_account(const Address& address) const;

  std::map<Address, TokenAmount> balances_;
  std::map<std::string, Address, std::less<>> contracts_;
  std::set<Address> contract_addresses_;
  std::vector<Escrow> escrows_;
  std::vector<LedgerEvent> events_;
  BlockHeight height_{0};
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_account_ = 0;
  TokenAmount supply_{0};
  TokenAmount fee_{0};
  Address fee_sink_{};
  bool token_events_ = true;
};

/// Serializes mutations: one writer at a time, concurrent readers between
/// transactions.
class LedgerQueue {
 public:
  template <typename F>
  decltype(auto) transact(F&& fn) {
    std::unique_lock lock(mutex_);
    return fn(ledger_);
  }

  template <typename F>
  decltype(auto) read(F&& fn) const {
    std::shared_lock lock(mutex_);
    return fn(static_cast<const Ledger&>(ledger_));
  }

 private:
  Ledger ledger_;
  mutable std::shared_mutex mutex_;
};

}  // namespace oraclesim::ledger
