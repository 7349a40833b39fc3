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

#include "oraclesim/ledger.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "oraclesim/crypto.hpp"
#include "oraclesim/error.hpp"

namespace oraclesim::ledger {

using nlohmann::json;

Address Address::from_hex(std::string_view hex) { return Address{digest_from_hex(hex)}; }

TokenAmount TokenAmount::operator+(TokenAmount other) const {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(units_, other.units_, &out)) {
    throw Error(ErrorCode::kOverflow, "token amount overflow");
  }
  return TokenAmount(out);
}

TokenAmount TokenAmount::operator-(TokenAmount other) const {
  if (other.units_ > units_) throw Error(ErrorCode::kOverflow, "token amount underflow");
  return TokenAmount(units_ - other.units_);
}

bool EventFilter::matches(const LedgerEvent& event) const {
  if (event.height < from || event.height > to) return false;
  if (topic.empty()) return true;
  if (topic.back() == '*') {
    std::string_view prefix(topic.data(), topic.size() - 1);
    return std::string_view(event.topic).starts_with(prefix);
  }
  return event.topic == topic;
}

std::string format_event(const LedgerEvent& event) {
  std::string line = std::to_string(event.height.value);
  line += ' ';
  line += std::to_string(event.seq);
  line += ' ';
  line += event.emitter.hex();
  line += ' ';
  line += event.topic;
  line += ' ';
  line += to_hex(event.payload);
  return line;
}

namespace {

std::uint64_t parse_u64(std::string_view field, std::string_view what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kMalformedLog, "bad " + std::string(what) + " field '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

LedgerEvent parse_event(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t next = line.find(' ', pos);
    if (next == std::string_view::npos) next = line.size();
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  // An empty payload serializes as a trailing empty field.
  if (fields.size() != 5) throw Error(ErrorCode::kMalformedLog, "expected 5 fields, got " + std::to_string(fields.size()));
  LedgerEvent event;
  event.height = BlockHeight{parse_u64(fields[0], "height")};
  event.seq = parse_u64(fields[1], "seq");
  try {
    event.emitter = Address::from_hex(fields[2]);
    event.payload = from_hex(fields[4]);
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedLog, e.what());
  }
  if (fields[3].empty()) throw Error(ErrorCode::kMalformedLog, "empty topic");
  event.topic = std::string(fields[3]);
  return event;
}

Address Ledger::create_account(TokenAmount initial_balance) {
  TokenAmount new_supply = supply_ + initial_balance;
  Address address{crypto::Sha256().update("ORACLE-ADDR-V1").update_be64(next_account_++).finish()};
  supply_ = new_supply;
  balances_[address] = initial_balance;
  if (token_events_) {
    emit(address, "mint", json{{"to", address.hex()}, {"amount", initial_balance.units()}}.dump());
  }
  return address;
}

Address Ledger::register_contract(std::string_view name) {
  if (auto it = contracts_.find(name); it != contracts_.end()) {
    throw Error(ErrorCode::kDuplicate, "contract '" + std::string(name) + "' already registered");
  }
  Address address{crypto::Sha256().update("ORACLE-CONTRACT-V1").update(name).finish()};
  balances_.emplace(address, TokenAmount{0});
  contracts_.emplace(std::string(name), address);
  contract_addresses_.insert(address);
  return address;
}

std::optional<Address> Ledger::contract(std::string_view name) const {
  if (auto it = contracts_.find(name); it != contracts_.end()) return it->second;
  return std::nullopt;
}

void Ledger::require_account(const Address& address) const {
  if (!balances_.contains(address)) throw Error(ErrorCode::kUnknownAddress, address.hex());
}

TokenAmount Ledger::balance(const Address& address) const {
  auto it = balances_.find(address);
  if (it == balances_.end()) throw Error(ErrorCode::kUnknownAddress, address.hex());
  return it->second;
}

TokenAmount Ledger::escrowed_by(const Address& address) const {
  TokenAmount total{0};
  for (const auto& e : escrows_) {
    if (e.open && e.owner == address) total += e.amount;
  }
  return total;
}

void Ledger::charge_fee(const Address& payer) {
  if (fee_.units() == 0 || contract_addresses_.contains(payer)) return;
  balances_[payer] -= fee_;
  balances_[fee_sink_] += fee_;
  if (token_events_) emit(payer, "fee", json{{"from", payer.hex()}, {"amount", fee_.units()}}.dump());
}

void Ledger::transfer(const Address& from, const Address& to, TokenAmount amount) {
  require_account(from);
  require_account(to);
  TokenAmount fee = contract_addresses_.contains(from) ? TokenAmount{0} : fee_;
  if (balances_[from] < amount + fee) {
    throw Error(ErrorCode::kInsufficientFunds, "transfer of " + std::to_string(amount.units()) + " from " + from.hex());
  }
  charge_fee(from);
  if (amount.units() == 0) return;
  balances_[from] -= amount;
  balances_[to] += amount;
  if (token_events_) {
    emit(from, "transfer", json{{"from", from.hex()}, {"to", to.hex()}, {"amount", amount.units()}}.dump());
  }
}

EscrowId Ledger::escrow(const Address& owner, const Address& holder, TokenAmount amount) {
  require_account(owner);
  require_account(holder);
  TokenAmount fee = contract_addresses_.contains(owner) ? TokenAmount{0} : fee_;
  if (balances_[owner] < amount + fee) {
    throw Error(ErrorCode::kInsufficientFunds, "escrow of " + std::to_string(amount.units()) + " from " + owner.hex());
  }
  charge_fee(owner);
  balances_[owner] -= amount;
  EscrowId id = escrows_.size();
  escrows_.push_back(Escrow{owner, holder, amount, true});
  if (token_events_) {
    emit(holder, "escrow",
         json{{"id", id}, {"owner", owner.hex()}, {"holder", holder.hex()}, {"amount", amount.units()}}.dump());
  }
  return id;
}

void Ledger::release(EscrowId id, const Address& to) {
  if (id >= escrows_.size()) throw Error(ErrorCode::kUnknownEscrow, std::to_string(id));
  require_account(to);
  Escrow& e = escrows_[id];
  if (!e.open) throw Error(ErrorCode::kEscrowClosed, "escrow " + std::to_string(id) + " already released");
  e.open = false;
  balances_[to] += e.amount;
  if (token_events_) {
    emit(e.holder, "release", json{{"id", id}, {"to", to.hex()}, {"amount", e.amount.units()}}.dump());
  }
}

const Escrow& Ledger::escrow_info(EscrowId id) const {
  if (id >= escrows_.size()) throw Error(ErrorCode::kUnknownEscrow, std::to_string(id));
  return escrows_[id];
}

const LedgerEvent& Ledger::emit(const Address& emitter, std::string_view topic, Bytes payload) {
  if (topic.empty() || topic.find_first_of(" \t\n") != std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument, "event topic must be a non-empty token");
  }
  events_.push_back(LedgerEvent{emitter, std::string(topic), std::move(payload), height_, next_seq_++});
  return events_.back();
}

std::vector<LedgerEvent> Ledger::read_events(const EventFilter& filter) const {
  std::vector<LedgerEvent> out;
  for (const auto& e : events_) {
    if (filter.matches(e)) out.push_back(e);
  }
  return out;
}

BlockHeight Ledger::advance_block() {
  height_.value += 1;
  next_seq_ = 0;
  return height_;
}

TokenAmount Ledger::total_balances() const {
  TokenAmount total{0};
  for (const auto& [_, amount] : balances_) total += amount;
  return total;
}

TokenAmount Ledger::total_open_escrows() const {
  TokenAmount total{0};
  for (const auto& e : escrows_) {
    if (e.open) total += e.amount;
  }
  return total;
}

bool Ledger::conserved() const { return total_balances() + total_open_escrows() == supply_; }

void Ledger::check_conservation() const {
  if (!conserved()) {
    std::ostringstream msg;
    msg << "balances " << total_balances().units() << " + escrows " << total_open_escrows().units()
        << " != supply " << supply_.units();
    throw Error(ErrorCode::kInvariantViolation, msg.str());
  }
}

void Ledger::set_flat_fee(TokenAmount fee) {
  if (fee.units() > 0 && !contract("fee-sink")) fee_sink_ = register_contract("fee-sink");
  fee_ = fee;
}

void Ledger::export_log(std::ostream& out) const {
  for (const auto& e : events_) out << format_event(e) << '\n';
}

}  // namespace oraclesim::ledger
