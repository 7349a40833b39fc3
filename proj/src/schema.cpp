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

#include "oraclesim/schema.hpp"

#include "oraclesim/error.hpp"

namespace oraclesim::node {

using nlohmann::json;

namespace {

const std::set<std::string> kTypes = {"object", "array", "string", "number", "integer", "boolean", "null"};
const std::set<std::string> kKeywords = {"type",      "properties", "required",  "additionalProperties", "items",
                                         "enum",      "minimum",    "maximum",   "minLength",            "maxLength",
                                         "title",     "description"};

void check_definition(const json& def, const std::string& where) {
  if (!def.is_object()) throw Error(ErrorCode::kInvalidArgument, "schema at '" + where + "' must be an object");
  for (const auto& [key, value] : def.items()) {
    if (!kKeywords.contains(key)) throw Error(ErrorCode::kInvalidArgument, "unsupported schema keyword '" + key + "'");
  }
  if (def.contains("type")) {
    const json& t = def["type"];
    auto check = [&](const json& name) {
      if (!name.is_string() || !kTypes.contains(name.get<std::string>())) {
        throw Error(ErrorCode::kInvalidArgument, "unknown schema type " + name.dump());
      }
    };
    if (t.is_array()) {
      for (const auto& n : t) check(n);
    } else {
      check(t);
    }
  }
  if (def.contains("properties")) {
    for (const auto& [key, sub] : def["properties"].items()) check_definition(sub, where + "/" + key);
  }
  if (def.contains("items")) check_definition(def["items"], where + "/items");
}

bool has_type(const json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "number") return value.is_number();
  if (type == "integer") {
    if (value.is_number_integer()) return true;
    if (value.is_number_float()) {
      double d = value.get<double>();
      return d == static_cast<double>(static_cast<long long>(d));
    }
    return false;
  }
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

std::set<std::string> declared_types(const json& def) {
  std::set<std::string> out;
  if (!def.contains("type")) return out;
  if (def["type"].is_array()) {
    for (const auto& t : def["type"]) out.insert(t.get<std::string>());
  } else {
    out.insert(def["type"].get<std::string>());
  }
  return out;
}

std::optional<SchemaViolation> check(const json& def, const json& value, const std::string& path) {
  auto fail = [&](std::string msg) { return SchemaViolation{path, std::move(msg)}; };
  auto types = declared_types(def);
  if (!types.empty()) {
    bool ok = false;
    for (const auto& t : types) ok = ok || has_type(value, t);
    if (!ok) return fail("expected type " + def["type"].dump() + ", got " + std::string(value.type_name()));
  }
  if (def.contains("enum")) {
    bool found = false;
    for (const auto& candidate : def["enum"]) found = found || candidate == value;
    if (!found) return fail("value " + value.dump() + " not in enum");
  }
  if (value.is_number()) {
    double d = value.get<double>();
    if (def.contains("minimum") && d < def["minimum"].get<double>()) return fail("below minimum");
    if (def.contains("maximum") && d > def["maximum"].get<double>()) return fail("above maximum");
  }
  if (value.is_string()) {
    auto len = value.get_ref<const std::string&>().size();
    if (def.contains("minLength") && len < def["minLength"].get<std::size_t>()) return fail("shorter than minLength");
    if (def.contains("maxLength") && len > def["maxLength"].get<std::size_t>()) return fail("longer than maxLength");
  }
  if (value.is_object()) {
    if (def.contains("required")) {
      for (const auto& key : def["required"]) {
        if (!value.contains(key.get<std::string>())) return fail("missing required property '" + key.get<std::string>() + "'");
      }
    }
    const json* props = def.contains("properties") ? &def["properties"] : nullptr;
    bool closed = def.contains("additionalProperties") && def["additionalProperties"] == false;
    for (const auto& [key, sub] : value.items()) {
      if (props && props->contains(key)) {
        if (auto v = check((*props)[key], sub, path + "/" + key)) return v;
      } else if (closed) {
        return SchemaViolation{path + "/" + key, "additional property not allowed"};
      }
    }
  }
  if (value.is_array() && def.contains("items")) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (auto v = check(def["items"], value[i], path + "/" + std::to_string(i))) return v;
    }
  }
  return std::nullopt;
}

}  // namespace

Schema::Schema(json definition) : definition_(std::move(definition)) { check_definition(definition_, ""); }

Schema Schema::of_type(std::string_view type) { return Schema(json{{"type", std::string(type)}}); }

std::optional<SchemaViolation> Schema::validate(const json& value) const { return check(definition_, value, ""); }

std::set<std::string> Schema::types() const { return declared_types(definition_); }

bool Schema::compatible_with(const Schema& next_input) const {
  auto out = types();
  auto in = next_input.types();
  if (out.empty() || in.empty()) return true;
  for (const auto& t : out) {
    if (in.contains(t)) return true;
    if (t == "integer" && in.contains("number")) return true;
    if (t == "number" && in.contains("integer")) return true;
  }
  return false;
}

}  // namespace oraclesim::node
