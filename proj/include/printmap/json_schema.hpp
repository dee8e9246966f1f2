#pragma once

#include <string>

#include "printmap/error.hpp"

namespace printmap {

/// Checks `value` against the subset of JSON Schema used by the tool
/// descriptors: type, properties, required, additionalProperties (false),
/// enum, pattern, minimum, exclusiveMinimum, minItems and items.
///
/// Throws ArgumentValidation; details carry the offending field path.
void validate_json(const json& schema, const json& value, const std::string& path = "");

}  // namespace printmap
