#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace smot {

// Body of a model response with surrounding whitespace and a single
// Markdown code fence (``` or ```json) removed.
std::string strip_code_fences(std::string_view text);

// Checks `value` against the JSON-schema subset the pipeline emits: type,
// properties, required, additionalProperties, items, enum, minItems, maxItems.
// Returns the first violation as "<json-pointer>: <reason>", nullopt if valid.
std::optional<std::string> validate_against_schema(const nlohmann::json& value,
                                                   const nlohmann::json& schema);

}  // namespace smot
