#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace labbook::analysis {

using CsvRow = std::vector<std::string>;

// RFC 4180 subset: quoted fields, doubled quotes, LF or CRLF. Blank lines
// are skipped. Throws Error(invalid_input) for an unterminated quote.
std::vector<CsvRow> parse_csv(std::string_view text, const std::string& source);

// Quotes a field when it holds a comma, quote or line break.
std::string csv_field(std::string_view field);

} // namespace labbook::analysis
