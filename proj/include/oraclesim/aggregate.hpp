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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "oraclesim/bytes.hpp"
#include "oraclesim/ledger.hpp"

namespace oraclesim::reporting {

/// Fixed-point number: `raw` counts units of 10^-decimals, where the scale
/// is fixed per SLA.
struct Numeric {
  std::int64_t raw = 0;
  auto operator<=>(const Numeric&) const = default;
};

using AnswerValue = std::variant<bool, Numeric, Bytes>;

enum class AnswerKind { kBoolean, kNumeric, kBytes };

AnswerKind kind_of(const AnswerValue& value);
std::string_view to_string(AnswerKind kind);
AnswerKind answer_kind_from_string(std::string_view name);

/// Decimal text ("-12.5", "3000") to fixed point, truncating digits beyond
/// `decimals`. Throws Error(kParseFailure) on anything else.
Numeric parse_fixed(std::string_view text, std::uint32_t decimals);
std::string format_fixed(Numeric value, std::uint32_t decimals);

/// Tagged, length-prefixed byte encoding: tag (0x01 boolean, 0x02 numeric,
/// 0x03 bytes) || big-endian u64 payload length || payload. Numerics are a
/// big-endian signed 16-byte integer.
Bytes canon(const AnswerValue& value);

nlohmann::json answer_to_json(const AnswerValue& value);
AnswerValue answer_from_json(const nlohmann::json& j);

struct Aggregator {
  enum class Method { kBooleanThreshold, kMean, kMedian, kTrimmedMean, kReputationWeighted };

  Method method = Method::kMedian;
  std::uint32_t threshold = 0;  // m for m-of-n boolean aggregation

  static Aggregator boolean(std::uint32_t m) { return {Method::kBooleanThreshold, m}; }
  static Aggregator mean() { return {Method::kMean}; }
  static Aggregator median() { return {Method::kMedian}; }
  static Aggregator trimmed() { return {Method::kTrimmedMean}; }
  static Aggregator reputation_weighted() { return {Method::kReputationWeighted}; }

  bool is_boolean() const { return method == Method::kBooleanThreshold; }
  /// "mean", "median", "trimmed", "reputation_weighted" or "threshold:<m>".
  std::string to_string() const;
  static Aggregator from_string(std::string_view text);
  bool operator==(const Aggregator&) const = default;
};

struct AggregationResult {
  enum class Status { kDecided, kUndecided };

  Status status = Status::kUndecided;
  AnswerValue answer = false;
  std::map<ledger::Address, bool> per_oracle_validity;
  std::vector<ledger::Address> contributing;
  Aggregator method;

  bool decided() const { return status == Status::kDecided; }
};

using BooleanReveal = std::pair<ledger::Address, bool>;
using NumericReveal = std::pair<ledger::Address, std::int64_t>;

/// m-of-n threshold. True iff at least m reveals are true. Undecided when
/// fewer than m oracles revealed and the false votes alone (n - m + 1) do
/// not settle the outcome. Validity is agreement with the answer; on an
/// undecided result every revealer is counted valid.
AggregationResult aggregate_boolean(std::span<const BooleanReveal> reveals, std::uint32_t threshold_m,
                                    std::uint32_t total_n);

/// Mean, median, MAD-trimmed mean or reputation-weighted trimmed mean over
/// fixed-point values. Integer division floors. `weights` (parts per
/// million) are only read by the reputation-weighted method. Empty input is
/// Undecided.
///
/// Outliers are values with |x - median| > 3 * MAD; nothing is an outlier
/// when MAD is 0. For the trimming methods validity means surviving that
/// filter. For plain mean and median a value is valid when it sits inside
/// the same band, or equals the median when MAD is 0.
AggregationResult aggregate_numeric(std::span<const NumericReveal> reveals, const Aggregator& method,
                                    const std::map<ledger::Address, std::uint64_t>& weights = {});

}  // namespace oraclesim::reporting
