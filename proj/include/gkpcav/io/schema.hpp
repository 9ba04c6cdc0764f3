// Copyright 2026 The gkpcav Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GKPCAV_IO_SCHEMA_HPP
#define GKPCAV_IO_SCHEMA_HPP

// Validator for the JSON Schema subset used by the shipped schemas: type,
// required, properties, additionalProperties (boolean or schema), items,
// enum, const, local $ref, minimum, maximum, exclusiveMinimum, exclusiveMaximum,
// minItems, maxItems, minLength and oneOf.

#include <string>
#include <vector>

#include "json.hpp"

namespace gkpcav::io {

using json = nlohmann::json;

namespace detail {

inline bool type_matches(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    if (v.is_number_float()) {
      const double d = v.get<double>();
      return d == static_cast<double>(static_cast<long long>(d));
    }
    return false;
  }
  return false;
}

inline void validate_at(const json& v, const json& schema, const json& root,
                        const std::string& path, std::vector<std::string>& errors) {
  if (schema.is_object()) {
    if (auto it = schema.find("$ref"); it != schema.end()) {
      const std::string ref = it->get<std::string>();
      if (ref.empty() || ref[0] != '#') {
        errors.push_back(path + ": unsupported $ref " + ref);
        return;
      }
      const json::json_pointer ptr(ref.substr(1));
      if (!root.contains(ptr)) {
        errors.push_back(path + ": unresolved $ref " + ref);
        return;
      }
      validate_at(v, root.at(ptr), root, path, errors);
      return;
    }
  }
  if (schema.is_boolean()) {
    if (!schema.get<bool>()) errors.push_back(path + ": not allowed");
    return;
  }
  if (!schema.is_object()) return;

  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_string()) {
      ok = type_matches(v, it->get<std::string>());
    } else {
      for (const auto& t : *it) ok = ok || type_matches(v, t.get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": expected type " + it->dump() + ", got " + v.type_name());
      return;
    }
  }
  if (auto it = schema.find("const"); it != schema.end() && v != *it) {
    errors.push_back(path + ": must equal " + it->dump());
  }
  if (auto it = schema.find("enum"); it != schema.end()) {
    bool found = false;
    for (const auto& e : *it) found = found || e == v;
    if (!found) errors.push_back(path + ": must be one of " + it->dump());
  }
  if (v.is_number()) {
    const double d = v.get<double>();
    if (auto it = schema.find("minimum"); it != schema.end() && d < it->get<double>()) {
      errors.push_back(path + ": must be >= " + it->dump());
    }
    if (auto it = schema.find("maximum"); it != schema.end() && d > it->get<double>()) {
      errors.push_back(path + ": must be <= " + it->dump());
    }
    if (auto it = schema.find("exclusiveMinimum"); it != schema.end() && d <= it->get<double>()) {
      errors.push_back(path + ": must be > " + it->dump());
    }
    if (auto it = schema.find("exclusiveMaximum"); it != schema.end() && d >= it->get<double>()) {
      errors.push_back(path + ": must be < " + it->dump());
    }
  }
  if (v.is_string()) {
    if (auto it = schema.find("minLength");
        it != schema.end() && v.get<std::string>().size() < it->get<std::size_t>()) {
      errors.push_back(path + ": string too short");
    }
  }
  if (v.is_array()) {
    if (auto it = schema.find("minItems"); it != schema.end() && v.size() < it->get<std::size_t>()) {
      errors.push_back(path + ": needs at least " + it->dump() + " items");
    }
    if (auto it = schema.find("maxItems"); it != schema.end() && v.size() > it->get<std::size_t>()) {
      errors.push_back(path + ": allows at most " + it->dump() + " items");
    }
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        validate_at(v[i], *it, root, path + "/" + std::to_string(i), errors);
      }
    }
  }
  if (v.is_object()) {
    if (auto it = schema.find("required"); it != schema.end()) {
      for (const auto& key : *it) {
        if (!v.contains(key.get<std::string>())) {
          errors.push_back(path + ": missing required key '" + key.get<std::string>() + "'");
        }
      }
    }
    const json* props = nullptr;
    if (auto it = schema.find("properties"); it != schema.end()) props = &*it;
    const auto extra = schema.find("additionalProperties");
    for (auto kv = v.begin(); kv != v.end(); ++kv) {
      const std::string child = path + "/" + kv.key();
      if (props != nullptr && props->contains(kv.key())) {
        validate_at(kv.value(), (*props)[kv.key()], root, child, errors);
      } else if (extra != schema.end()) {
        if (extra->is_boolean() && !extra->get<bool>()) {
          errors.push_back(child + ": unknown key");
        } else {
          validate_at(kv.value(), *extra, root, child, errors);
        }
      }
    }
  }
  if (auto it = schema.find("oneOf"); it != schema.end()) {
    int matches = 0;
    for (const auto& alt : *it) {
      std::vector<std::string> sub;
      validate_at(v, alt, root, path, sub);
      if (sub.empty()) ++matches;
    }
    if (matches != 1) {
      errors.push_back(path + ": must match exactly one alternative (matched " +
                       std::to_string(matches) + ")");
    }
  }
}

}  // namespace detail

/// Returns human-readable violations as "<json-pointer>: <message>"; empty
/// when `instance` conforms. The root path is reported as "$".
inline std::vector<std::string> validate(const json& instance, const json& schema) {
  std::vector<std::string> errors;
  detail::validate_at(instance, schema, schema, "$", errors);
  return errors;
}

}  // namespace gkpcav::io

#endif  // GKPCAV_IO_SCHEMA_HPP
