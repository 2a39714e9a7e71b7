#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace labbook {

using Json = nlohmann::json;

// Sorted keys, no insignificant whitespace, trailing line feed. Throws
// Error(invalid_input) on strings that are not valid UTF-8.
std::string canonical_dump(const Json& value);

// Compact single-line dump without the trailing line feed.
std::string compact_dump(const Json& value);

// Throws Error(invalid_input) with `what` in the message on syntax errors.
Json parse_json(std::string_view text, std::string_view what);

} // namespace labbook
