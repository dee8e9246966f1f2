#include "printmap/json_schema.hpp"

#include <cmath>
#include <regex>

namespace printmap {

namespace {

bool has_type(const json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  if (type == "number") return value.is_number();
  if (type == "integer") {
    return value.is_number_integer() ||
           (value.is_number_float() && std::trunc(value.get<double>()) == value.get<double>());
  }
  return false;
}

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  const std::string field = path.empty() ? "arguments" : path;
  throw Error(ErrorKind::ArgumentValidation, field + ": " + message, {{"field", field}});
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

}  // namespace

void validate_json(const json& schema, const json& value, const std::string& path) {
  if (!schema.is_object()) return;

  if (schema.contains("type")) {
    const json& type = schema.at("type");
    bool ok = false;
    if (type.is_string()) {
      ok = has_type(value, type.get<std::string>());
    } else {
      for (const auto& t : type) ok = ok || has_type(value, t.get<std::string>());
    }
    if (!ok) fail(path, "expected type " + (type.is_string() ? type.get<std::string>() : type.dump()));
  }

  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& option : schema.at("enum")) found = found || option == value;
    if (!found) fail(path, "must be one of " + schema.at("enum").dump());
  }

  if (value.is_string() && schema.contains("pattern")) {
    const std::regex re(schema.at("pattern").get<std::string>());
    if (!std::regex_search(value.get<std::string>(), re)) {
      fail(path, "must match " + schema.at("pattern").get<std::string>());
    }
  }

  if (value.is_number()) {
    const double v = value.get<double>();
    if (schema.contains("minimum") && v < schema.at("minimum").get<double>()) {
      fail(path, "must be >= " + schema.at("minimum").dump());
    }
    if (schema.contains("exclusiveMinimum") && !(v > schema.at("exclusiveMinimum").get<double>())) {
      fail(path, "must be > " + schema.at("exclusiveMinimum").dump());
    }
  }

  if (value.is_array()) {
    if (schema.contains("minItems") && value.size() < schema.at("minItems").get<std::size_t>()) {
      fail(path, "needs at least " + schema.at("minItems").dump() + " items");
    }
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        validate_json(schema.at("items"), value[i], path + "[" + std::to_string(i) + "]");
      }
    }
  }

  if (value.is_object()) {
    const json empty = json::object();
    const json& properties = schema.contains("properties") ? schema.at("properties") : empty;
    if (schema.contains("required")) {
      for (const auto& key : schema.at("required")) {
        if (!value.contains(key.get<std::string>())) {
          fail(child(path, key.get<std::string>()), "is required");
        }
      }
    }
    for (const auto& [key, item] : value.items()) {
      if (properties.contains(key)) {
        validate_json(properties.at(key), item, child(path, key));
      } else if (schema.contains("additionalProperties")) {
        const json& extra = schema.at("additionalProperties");
        if (extra.is_boolean() && !extra.get<bool>()) fail(child(path, key), "unknown argument");
        validate_json(extra, item, child(path, key));
      }
    }
  }
}

}  // namespace printmap
