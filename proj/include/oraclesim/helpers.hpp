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
#include <string>
#include <string_view>

#include <json.hpp>

// Parsing helpers applied to intermediate query results.
//
// Every failure throws oraclesim::Error with one of three distinct codes:
// kParseFailure when the input is not a well-formed document, kPathMiss when
// the addressed element does not exist and kOutOfBounds for slices past the
// end of the input. Malformed path expressions raise kBadExpression.
namespace oraclesim::query {

/// Dot-separated object keys and non-negative array indices, e.g.
/// `result.XETHZUSD.c.0`. An empty path addresses the whole document.
const nlohmann::json& json_lookup(const nlohmann::json& doc, std::string_view path);

/// String leaves are returned unquoted; any other value is returned as its
/// compact JSON serialization.
std::string helper_json(std::string_view doc, std::string_view path);

/// Slash-separated element names starting at the root element, e.g. `r/p`.
/// Returns the trimmed text content of the first matching element.
std::string helper_xml(std::string_view doc, std::string_view path);

/// Child-axis XPath subset: `/a/b[2]/*`, optional trailing `@attr` or
/// `text()`. Multiple matches resolve to the first in document order.
std::string helper_xpath(std::string_view doc, std::string_view expr);

std::string helper_slice(std::string_view input, std::uint64_t offset, std::uint64_t length);

}  // namespace oraclesim::query
