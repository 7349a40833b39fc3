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

#include "oraclesim/helpers.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "oraclesim/error.hpp"

namespace oraclesim::query {

namespace pt = boost::property_tree;
using nlohmann::json;

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = text.find(sep, pos);
    parts.push_back(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

std::optional<std::uint64_t> parse_index(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

pt::ptree parse_xml(std::string_view doc) {
  std::istringstream in{std::string(doc)};
  pt::ptree tree;
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::kParseFailure, std::string("xml: ") + e.what());
  }
  return tree;
}

bool is_element(const std::string& name) { return !name.empty() && name.front() != '<'; }

struct Step {
  enum class Kind { kElement, kAttribute, kText };
  Kind kind = Kind::kElement;
  std::string name;  // "*" matches any element
  std::uint64_t position = 0;  // 1-based; 0 = no predicate
};

Step parse_step(std::string_view text, std::string_view expr) {
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::kBadExpression, "'" + std::string(expr) + "': " + why);
  };
  if (text.empty()) throw bad("empty step");
  Step step;
  if (text == "text()") {
    step.kind = Step::Kind::kText;
    return step;
  }
  if (text.front() == '@') {
    step.kind = Step::Kind::kAttribute;
    step.name = std::string(text.substr(1));
    if (step.name.empty()) throw bad("empty attribute name");
    return step;
  }
  std::size_t open = text.find('[');
  step.name = std::string(text.substr(0, open));
  if (step.name.empty()) throw bad("empty element name");
  if (open != std::string_view::npos) {
    if (text.back() != ']') throw bad("unterminated predicate");
    auto index = parse_index(text.substr(open + 1, text.size() - open - 2));
    if (!index || *index == 0) throw bad("predicate must be a positive integer");
    step.position = *index;
  }
  if (step.name.find_first_of("[]@()") != std::string::npos) throw bad("unsupported step syntax");
  return step;
}

std::vector<Step> parse_steps(std::string_view expr) {
  std::string_view body = expr;
  if (body.starts_with("//")) {
    throw Error(ErrorCode::kBadExpression, "'" + std::string(expr) + "': only the child axis is supported");
  }
  if (body.starts_with('/')) body.remove_prefix(1);
  if (body.empty()) throw Error(ErrorCode::kBadExpression, "empty path");
  std::vector<Step> steps;
  auto parts = split(body, '/');
  for (std::size_t i = 0; i < parts.size(); ++i) {
    Step step = parse_step(parts[i], expr);
    if (step.kind != Step::Kind::kElement && i + 1 != parts.size()) {
      throw Error(ErrorCode::kBadExpression, "'" + std::string(expr) + "': @attr and text() must be the last step");
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

std::string evaluate(const pt::ptree& document, const std::vector<Step>& steps, std::string_view expr) {
  std::vector<const pt::ptree*> context{&document};
  for (const Step& step : steps) {
    if (step.kind == Step::Kind::kText) {
      return context.front()->data();
    }
    if (step.kind == Step::Kind::kAttribute) {
      for (const pt::ptree* node : context) {
        if (auto attrs = node->get_child_optional("<xmlattr>")) {
          if (auto value = attrs->get_child_optional(pt::ptree::path_type(step.name, '\0'))) {
            return value->data();
          }
        }
      }
      throw Error(ErrorCode::kPathMiss, "'" + std::string(expr) + "': no attribute @" + step.name);
    }
    std::vector<const pt::ptree*> next;
    for (const pt::ptree* node : context) {
      std::uint64_t seen = 0;
      for (const auto& [name, child] : *node) {
        if (!is_element(name)) continue;
        if (step.name != "*" && name != step.name) continue;
        ++seen;
        if (step.position == 0 || seen == step.position) next.push_back(&child);
        if (step.position != 0 && seen == step.position) break;
      }
    }
    if (next.empty()) throw Error(ErrorCode::kPathMiss, "'" + std::string(expr) + "': no match for step " + step.name);
    context = std::move(next);
  }
  return context.front()->data();
}

}  // namespace

const json& json_lookup(const json& doc, std::string_view path) {
  const json* node = &doc;
  if (path.empty()) return *node;
  for (std::string_view key : split(path, '.')) {
    if (key.empty()) throw Error(ErrorCode::kBadExpression, "empty segment in json path '" + std::string(path) + "'");
    if (node->is_object()) {
      auto it = node->find(std::string(key));
      if (it == node->end()) throw Error(ErrorCode::kPathMiss, "json path '" + std::string(path) + "': no key " + std::string(key));
      node = &*it;
    } else if (node->is_array()) {
      auto index = parse_index(key);
      if (!index || *index >= node->size()) {
        throw Error(ErrorCode::kPathMiss, "json path '" + std::string(path) + "': no index " + std::string(key));
      }
      node = &(*node)[*index];
    } else {
      throw Error(ErrorCode::kPathMiss, "json path '" + std::string(path) + "': cannot descend into scalar at " + std::string(key));
    }
  }
  return *node;
}

std::string helper_json(std::string_view doc, std::string_view path) {
  json parsed = json::parse(doc, nullptr, false);
  if (parsed.is_discarded()) throw Error(ErrorCode::kParseFailure, "json: malformed document");
  const json& value = json_lookup(parsed, path);
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

std::string helper_xml(std::string_view doc, std::string_view path) {
  if (path.starts_with('/')) throw Error(ErrorCode::kBadExpression, "xml path is relative to the document: '" + std::string(path) + "'");
  auto steps = parse_steps(path);
  for (const auto& step : steps) {
    if (step.kind != Step::Kind::kElement || step.name == "*") {
      throw Error(ErrorCode::kBadExpression, "xml path accepts element names only: '" + std::string(path) + "'");
    }
  }
  return evaluate(parse_xml(doc), steps, path);
}

std::string helper_xpath(std::string_view doc, std::string_view expr) {
  auto steps = parse_steps(expr);
  return evaluate(parse_xml(doc), steps, expr);
}

std::string helper_slice(std::string_view input, std::uint64_t offset, std::uint64_t length) {
  if (offset > input.size() || length > input.size() - offset) {
    throw Error(ErrorCode::kOutOfBounds, "slice(" + std::to_string(offset) + ", " + std::to_string(length) +
                                             ") of " + std::to_string(input.size()) + " bytes");
  }
  return std::string(input.substr(offset, length));
}

}  // namespace oraclesim::query
