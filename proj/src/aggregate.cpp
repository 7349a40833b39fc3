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

#include "oraclesim/aggregate.hpp"

#include <algorithm>
#include <charconv>

#include "oraclesim/error.hpp"

namespace oraclesim::reporting {

using nlohmann::json;
using Wide = __int128;

namespace {

Wide floor_div(Wide num, Wide den) {
  Wide q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

std::int64_t narrow(Wide value) {
  if (value > std::numeric_limits<std::int64_t>::max() || value < std::numeric_limits<std::int64_t>::min()) {
    throw Error(ErrorCode::kOverflow, "aggregate out of 64-bit range");
  }
  return static_cast<std::int64_t>(value);
}

Wide abs_wide(Wide v) { return v < 0 ? -v : v; }

// Twice the median of a sorted sequence, exact for even lengths.
Wide doubled_median(const std::vector<Wide>& sorted) {
  std::size_t n = sorted.size();
  return n % 2 == 1 ? 2 * sorted[n / 2] : sorted[n / 2 - 1] + sorted[n / 2];
}

struct Band {
  Wide median2 = 0;  // 2 * median
  Wide mad4 = 0;     // 4 * MAD

  // |x - median| <= 3 * MAD, i.e. 2 * |2x - median2| <= 3 * mad4
  bool inside(std::int64_t x) const { return 2 * abs_wide(2 * Wide{x} - median2) <= 3 * mad4; }
};

Band robust_band(std::span<const NumericReveal> reveals) {
  std::vector<Wide> values;
  values.reserve(reveals.size());
  for (const auto& [_, v] : reveals) values.push_back(v);
  std::sort(values.begin(), values.end());
  Band band;
  band.median2 = doubled_median(values);
  std::vector<Wide> deviations;
  deviations.reserve(values.size());
  for (Wide v : values) deviations.push_back(abs_wide(2 * v - band.median2));
  std::sort(deviations.begin(), deviations.end());
  band.mad4 = doubled_median(deviations);
  return band;
}

}  // namespace

AnswerKind kind_of(const AnswerValue& value) {
  switch (value.index()) {
    case 0: return AnswerKind::kBoolean;
    case 1: return AnswerKind::kNumeric;
    default: return AnswerKind::kBytes;
  }
}

std::string_view to_string(AnswerKind kind) {
  switch (kind) {
    case AnswerKind::kBoolean: return "boolean";
    case AnswerKind::kNumeric: return "numeric";
    case AnswerKind::kBytes: return "bytes";
  }
  return "unknown";
}

AnswerKind answer_kind_from_string(std::string_view name) {
  if (name == "boolean") return AnswerKind::kBoolean;
  if (name == "numeric") return AnswerKind::kNumeric;
  if (name == "bytes") return AnswerKind::kBytes;
  throw Error(ErrorCode::kInvalidArgument, "unknown answer kind '" + std::string(name) + "'");
}

Numeric parse_fixed(std::string_view text, std::uint32_t decimals) {
  auto fail = [&] { return Error(ErrorCode::kParseFailure, "not a decimal number: '" + std::string(text) + "'"); };
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  std::size_t dot = body.find('.');
  std::string_view whole = body.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw fail();
  auto all_digits = [](std::string_view s) { return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }); };
  if (!all_digits(whole) || !all_digits(frac)) throw fail();
  if (dot != std::string_view::npos && frac.empty() && whole.empty()) throw fail();
  Wide value = 0;
  auto push = [&](char c) {
    value = value * 10 + (c - '0');
    if (value > Wide{std::numeric_limits<std::int64_t>::max()}) throw Error(ErrorCode::kOverflow, "fixed-point overflow");
  };
  for (char c : whole) push(c);
  for (std::uint32_t i = 0; i < decimals; ++i) push(i < frac.size() ? frac[i] : '0');
  return Numeric{static_cast<std::int64_t>(negative ? -value : value)};
}

std::string format_fixed(Numeric value, std::uint32_t decimals) {
  Wide v = value.raw;
  bool negative = v < 0;
  if (negative) v = -v;
  Wide scale = 1;
  for (std::uint32_t i = 0; i < decimals; ++i) scale *= 10;
  auto digits = [](Wide x) {
    std::string s;
    do {
      s.push_back(static_cast<char>('0' + static_cast<int>(x % 10)));
      x /= 10;
    } while (x > 0);
    std::reverse(s.begin(), s.end());
    return s;
  };
  std::string out = negative ? "-" : "";
  out += digits(v / scale);
  if (decimals > 0) {
    std::string frac = digits(v % scale);
    out += '.';
    out += std::string(decimals - frac.size(), '0') + frac;
  }
  return out;
}

Bytes canon(const AnswerValue& value) {
  Bytes out;
  switch (kind_of(value)) {
    case AnswerKind::kBoolean:
      out.push_back(0x01);
      append_be64(out, 1);
      out.push_back(std::get<bool>(value) ? 0x01 : 0x00);
      break;
    case AnswerKind::kNumeric: {
      out.push_back(0x02);
      append_be64(out, 16);
      Wide raw = std::get<Numeric>(value).raw;
      auto bits = static_cast<unsigned __int128>(raw);
      for (int shift = 120; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(bits >> shift));
      break;
    }
    case AnswerKind::kBytes: {
      const auto& bytes = std::get<Bytes>(value);
      out.push_back(0x03);
      append_be64(out, bytes.size());
      append(out, bytes);
      break;
    }
  }
  return out;
}

json answer_to_json(const AnswerValue& value) {
  switch (kind_of(value)) {
    case AnswerKind::kBoolean: return json{{"bool", std::get<bool>(value)}};
    case AnswerKind::kNumeric: return json{{"num", std::get<Numeric>(value).raw}};
    case AnswerKind::kBytes: return json{{"bytes", to_hex(std::get<Bytes>(value))}};
  }
  return {};
}

AnswerValue answer_from_json(const json& j) {
  if (j.contains("bool")) return j.at("bool").get<bool>();
  if (j.contains("num")) return Numeric{j.at("num").get<std::int64_t>()};
  if (j.contains("bytes")) return from_hex(j.at("bytes").get<std::string>());
  throw Error(ErrorCode::kParseFailure, "answer value: " + j.dump());
}

std::string Aggregator::to_string() const {
  switch (method) {
    case Method::kBooleanThreshold: return "threshold:" + std::to_string(threshold);
    case Method::kMean: return "mean";
    case Method::kMedian: return "median";
    case Method::kTrimmedMean: return "trimmed";
    case Method::kReputationWeighted: return "reputation_weighted";
  }
  return "unknown";
}

Aggregator Aggregator::from_string(std::string_view text) {
  if (text == "mean") return mean();
  if (text == "median") return median();
  if (text == "trimmed") return trimmed();
  if (text == "reputation_weighted") return reputation_weighted();
  if (text.starts_with("threshold:")) {
    std::string_view num = text.substr(10);
    std::uint32_t m = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), m);
    if (ec == std::errc() && ptr == num.data() + num.size() && !num.empty()) return boolean(m);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown aggregator '" + std::string(text) + "'");
}

AggregationResult aggregate_boolean(std::span<const BooleanReveal> reveals, std::uint32_t threshold_m,
                                    std::uint32_t total_n) {
  if (threshold_m > total_n) throw Error(ErrorCode::kInvalidArgument, "threshold m exceeds n");
  if (reveals.size() > total_n) throw Error(ErrorCode::kInvalidArgument, "more reveals than oracles");
  AggregationResult result;
  result.method = Aggregator::boolean(threshold_m);
  std::size_t trues = 0;
  for (const auto& [_, vote] : reveals) trues += vote ? 1 : 0;
  std::size_t falses = reveals.size() - trues;

  if (trues >= threshold_m) {
    result.status = AggregationResult::Status::kDecided;
    result.answer = true;
  } else if (reveals.size() < threshold_m && falses < total_n - threshold_m + 1) {
    result.status = AggregationResult::Status::kUndecided;
    for (const auto& [oracle, _] : reveals) {
      result.per_oracle_validity[oracle] = true;
      result.contributing.push_back(oracle);
    }
    return result;
  } else {
    result.status = AggregationResult::Status::kDecided;
    result.answer = false;
  }
  bool answer = std::get<bool>(result.answer);
  for (const auto& [oracle, vote] : reveals) {
    result.per_oracle_validity[oracle] = vote == answer;
    if (vote == answer) result.contributing.push_back(oracle);
  }
  return result;
}

AggregationResult aggregate_numeric(std::span<const NumericReveal> reveals, const Aggregator& method,
                                    const std::map<ledger::Address, std::uint64_t>& weights) {
  AggregationResult result;
  result.method = method;
  if (method.is_boolean()) throw Error(ErrorCode::kInvalidArgument, "boolean aggregator on numeric reveals");
  if (reveals.empty()) return result;

  const Band band = robust_band(reveals);
  const bool trimming = method.method == Aggregator::Method::kTrimmedMean ||
                        method.method == Aggregator::Method::kReputationWeighted;

  std::vector<NumericReveal> survivors;
  for (const auto& reveal : reveals) {
    bool in_band = band.mad4 == 0 ? (trimming || 2 * Wide{reveal.second} == band.median2) : band.inside(reveal.second);
    result.per_oracle_validity[reveal.first] = in_band;
    if (!trimming || in_band) {
      survivors.push_back(reveal);
      result.contributing.push_back(reveal.first);
    }
  }

  Wide answer = 0;
  switch (method.method) {
    case Aggregator::Method::kMedian:
      answer = floor_div(band.median2, 2);
      break;
    case Aggregator::Method::kMean:
    case Aggregator::Method::kTrimmedMean: {
      Wide sum = 0;
      for (const auto& [_, v] : survivors) sum += v;
      answer = floor_div(sum, static_cast<Wide>(survivors.size()));
      break;
    }
    case Aggregator::Method::kReputationWeighted: {
      Wide sum = 0;
      Wide total = 0;
      for (const auto& [oracle, v] : survivors) {
        auto it = weights.find(oracle);
        Wide w = it == weights.end() ? 0 : Wide{it->second};
        sum += w * v;
        total += w;
      }
      if (total == 0) {
        for (const auto& [_, v] : survivors) sum += v;
        total = static_cast<Wide>(survivors.size());
      }
      answer = floor_div(sum, total);
      break;
    }
    case Aggregator::Method::kBooleanThreshold:
      break;
  }
  result.status = AggregationResult::Status::kDecided;
  result.answer = Numeric{narrow(answer)};
  return result;
}

}  // namespace oraclesim::reporting
