#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace arqsched::csv {

// RFC-4180-style quoting: fields containing commas, quotes, or newlines are
// wrapped in double quotes with embedded quotes doubled.
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

// Inverse of join for one record. Embedded newlines inside quoted fields are
// not supported here; parse() handles full documents.
std::vector<std::string> parse_line(std::string_view line);

// Splits a document into records, honoring quoted fields (including embedded
// line breaks) and both LF and CRLF endings.
std::vector<std::vector<std::string>> parse(std::string_view text);

// Fixed-width-free, locale-independent rendering used for all numeric output.
std::string format_double(double value);

} // namespace arqsched::csv
