#pragma once

// Validation against the subset of JSON Schema used by the shipped schema
// files: type, enum, const, anyOf, properties, required,
// additionalProperties (boolean), items, minItems, maxItems, minimum,
// maximum, exclusiveMinimum, exclusiveMaximum.

#include <string>
#include <vector>

#include <json.hpp>

namespace hylo {

struct SchemaIssue {
  std::string pointer;  // JSON pointer of the offending value ("" for the root)
  std::string message;
};

// Empty when the instance conforms.
std::vector<SchemaIssue> validate_schema(const nlohmann::json& schema, const nlohmann::json& instance);

}  // namespace hylo
