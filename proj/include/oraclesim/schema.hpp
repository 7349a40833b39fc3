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

#include <optional>
#include <set>
#include <string>

#include <json.hpp>

namespace oraclesim::node {

struct SchemaViolation {
  std::string path;  // JSON pointer into the validated value, "" for the root
  std::string message;
};

/// Structural schema over document values, a subset of JSON Schema:
/// `type` (string or list), `properties`, `required`,
/// `additionalProperties` (boolean), `items`, `enum`, `minimum`, `maximum`,
/// `minLength` and `maxLength`. The empty schema accepts everything.
class Schema {
 public:
  Schema() = default;
  /// Throws Error(kInvalidArgument) for unsupported keywords or types.
  explicit Schema(nlohmann::json definition);

  static Schema of_type(std::string_view type);

  std::optional<SchemaViolation> validate(const nlohmann::json& value) const;
  /// Declared top-level types; empty means unconstrained.
  std::set<std::string> types() const;
  /// True when some value could satisfy both this (output) schema and the
  /// next step's input schema.
  bool compatible_with(const Schema& next_input) const;

  const nlohmann::json& definition() const { return definition_; }

 private:
  nlohmann::json definition_ = nlohmann::json::object();
};

}  // namespace oraclesim::node
